#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aopsic/moments.hpp"
#include "aopsic/numerics.hpp"

namespace aopsic {

enum class BasisFamily {
  OddOnly,   // phi_p(x) = x * sum_k c_{p,k} |x|^{2k}
  Extended,  // phi_d(x) = sum_k c_{d,k} |x|^k, real valued, degree d = 0..P
};

inline constexpr double kRankTolerance = 1e-9;

/// Orthonormal polynomial basis built from moments. coeffs[j] holds the
/// normalized coefficients of basis function j, lowest power first.
struct OrthonormalBasis {
  BasisFamily family = BasisFamily::OddOnly;
  int max_order = 1;
  int effective_rank = 0;
  std::vector<std::vector<double>> coeffs;
  std::vector<std::vector<double>> monic;  // pre-normalization coefficients
  std::vector<double> norm_sq;             // z^2 of each monic polynomial
  MomentVector moments;

  /// Number of basis functions requested by max_order.
  int requested_rank() const noexcept;
};

/// (p-1)x(p-1) Hankel matrix of moments. For even-only moments, entry (i,j)
/// (1-based) is E|x|^{2(i+j-1)}.
RealMatrix build_hankel(const MomentVector& mu, int p);

/// Monic coefficients [c_bar, 1] of the order-p orthogonal polynomial.
/// Throws RankDeficientError when that polynomial has (numerically) zero norm.
std::vector<double> solve_monic(const MomentVector& mu, int p);

/// Normalized coefficients c / z with z^2 = sum_k (c*c)_k m(k).
std::vector<double> normalize(std::span<const double> c, const MomentVector& mu);

/// z^2 of a coefficient vector under the moments.
double norm_squared(std::span<const double> c, const MomentVector& mu);

/// E[phi_a conj(phi_b)] evaluated exactly from coefficients and moments.
double inner_product(std::span<const double> a, std::span<const double> b, const MomentVector& mu);

/// Incrementally maintained inverse of the order-p Hankel matrix.
struct HankelState {
  int p = 2;
  RealMatrix inverse;             // (p-1)x(p-1)
  double pivot = 0.0;             // Schur pivot that produced the last block
  std::vector<double> monic;      // monic coefficients of the order-(p-1) polynomial
  std::uint64_t flops = 0;        // multiply-adds spent in the last extension
};

HankelState hankel_base(const MomentVector& mu);

/// Block-inverse update from order p to p+1. Throws RankDeficientError(p)
/// when the Schur pivot is below kRankTolerance times the new diagonal moment.
HankelState schur_extend(const HankelState& state, const MomentVector& mu);

/// Odd-only basis with up to (P+1)/2 functions; truncates on rank deficiency.
OrthonormalBasis build_basis(const MomentVector& mu, int max_order);

/// Plain polynomials of degree 0..P in |x| built from all-orders moments.
OrthonormalBasis build_extended_basis(const MomentVector& mu, int max_order);

/// phi_p(x) for p = 1..effective_rank.
ComplexVec evaluate_regressor(const OrthonormalBasis& basis, Complex x);
void evaluate_regressor(const OrthonormalBasis& basis, Complex x, std::span<Complex> out);

/// Raw monomial values [x, |x|^2 x, ...] (odd-only) or [1, |x|, ...] (extended).
void evaluate_monomials(BasisFamily family, int count, Complex x, std::span<Complex> out);

/// Lower-triangular r x r matrix mapping monomial values to basis values.
RealMatrix change_of_basis(const OrthonormalBasis& basis);

/// Throws NonPositiveNorm unless every function has unit norm to tol.
void validate_basis(const OrthonormalBasis& basis, double tol = 1e-8);

}  // namespace aopsic
