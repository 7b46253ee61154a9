#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace aopsic {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

/// Dense row-major real matrix. Only what the Hankel recursion, whitening
/// and verification code need; not a general linear algebra type.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static RealMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> entries() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double max_abs() const noexcept;
  RealMatrix transposed() const;
  RealMatrix operator*(const RealMatrix& rhs) const;
  std::vector<double> operator*(std::span<const double> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square complex matrix, row-major. Used for the Hermitian covariance of the
/// whitened-HP baseline.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const noexcept { return n_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

inline constexpr double kPivotTolerance = 1e-12;

struct SolveResult {
  std::vector<double> x;
  double residual_norm = 0.0;  // ||A x - b||_2
};

/// Solves A x = b for square symmetric A by Gaussian elimination with partial
/// pivoting. Throws SingularMatrix when a pivot magnitude drops below
/// kPivotTolerance * max|A|.
SolveResult solve_symmetric(const RealMatrix& a, std::span<const double> b);

/// Inverse of a symmetric matrix, column by column through solve_symmetric.
RealMatrix invert_symmetric(const RealMatrix& a);

/// Full linear convolution of two coefficient sequences.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

/// c * c; the coefficients of the squared polynomial.
std::vector<double> self_convolve(std::span<const double> c);

bool is_power_of_two(std::size_t n) noexcept;

// Radix-2 transforms scaled by 1/sqrt(N) in both directions, so energy is
// preserved. BadLength unless the length is a power of two.
ComplexVec fft(std::span<const Complex> x);
ComplexVec ifft(std::span<const Complex> x);

/// Lower-triangular L with L L^T = A. NotPositiveDefinite if a pivot <= 0.
RealMatrix cholesky(const RealMatrix& a);

/// Lower-triangular L with L L^H = A for Hermitian A.
ComplexMatrix cholesky_hermitian(const ComplexMatrix& a);

/// Inverse of a lower-triangular complex matrix by forward substitution.
ComplexMatrix invert_lower(const ComplexMatrix& l);

/// Identifies one reproducible random stream.
struct RngState {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
};

/// Seeded generator. Identical (seed, stream) pairs produce identical
/// sequences; distinct stream ids give independent sequences for one seed.
class Rng {
 public:
  explicit Rng(RngState state);

  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  double normal();                      // N(0, 1)
  std::size_t index(std::size_t n);     // uniform over [0, n)
  Complex complex_normal(double variance);

  const RngState& state() const noexcept { return state_; }

 private:
  RngState state_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Circularly-symmetric complex Gaussian samples, E|x|^2 = variance.
ComplexVec rng_complex_gaussian(Rng& rng, std::size_t n, double variance);

}  // namespace aopsic
