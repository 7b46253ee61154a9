#include "aopsic/orthopoly.hpp"

#include <cmath>
#include <string>

#include "aopsic/error.hpp"

namespace aopsic {

namespace {

void require_extent(const MomentVector& mu, std::size_t k, const char* who) {
  if (mu.max_index() == 0 || mu.hankel_extent() < k) {
    throw Error(ErrorCode::InsufficientMoments,
                std::string(who) + ": moments do not reach Hankel index " + std::to_string(k));
  }
}

// Monic norm z^2 = m(2p-2) + sum_i c_bar_i m(p-1+i), i.e. E[c(t) t^{p-1}].
double monic_norm(std::span<const double> c_bar, const MomentVector& mu) {
  const std::size_t p = c_bar.size() + 1;
  double s = mu.hankel_entry(2 * p - 2);
  for (std::size_t i = 0; i < c_bar.size(); ++i) s += c_bar[i] * mu.hankel_entry(p - 1 + i);
  return s;
}

}  // namespace

int OrthonormalBasis::requested_rank() const noexcept {
  return family == BasisFamily::OddOnly ? (max_order + 1) / 2 : max_order + 1;
}

RealMatrix build_hankel(const MomentVector& mu, int p) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "build_hankel: p must be >= 2");
  const std::size_t n = static_cast<std::size_t>(p - 1);
  require_extent(mu, 2 * n - 2, "build_hankel");
  RealMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = mu.hankel_entry(i + j);
  return h;
}

std::vector<double> solve_monic(const MomentVector& mu, int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "solve_monic: p must be >= 1");
  if (p == 1) return {1.0};
  const std::size_t n = static_cast<std::size_t>(p - 1);
  require_extent(mu, 2 * n, "solve_monic");
  const RealMatrix h = build_hankel(mu, p);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -mu.hankel_entry(n + i);
  std::vector<double> c;
  try {
    c = solve_symmetric(h, rhs).x;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    throw RankDeficientError(p, "solve_monic: moment Hankel matrix is singular at order " + std::to_string(p));
  }
  const double z2 = monic_norm(c, mu);
  if (!(z2 > kRankTolerance * mu.hankel_entry(2 * n))) {
    throw RankDeficientError(p, "solve_monic: order " + std::to_string(p) + " polynomial has zero norm");
  }
  c.push_back(1.0);
  return c;
}

double inner_product(std::span<const double> a, std::span<const double> b, const MomentVector& mu) {
  const auto prod = convolve(a, b);
  require_extent(mu, prod.size() - 1, "inner_product");
  double s = 0.0;
  for (std::size_t k = 0; k < prod.size(); ++k) s += prod[k] * mu.hankel_entry(k);
  return s;
}

double norm_squared(std::span<const double> c, const MomentVector& mu) {
  if (c.empty()) throw Error(ErrorCode::InvalidArgument, "norm_squared: empty coefficients");
  const auto sq = self_convolve(c);
  require_extent(mu, sq.size() - 1, "norm_squared");
  double s = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) s += sq[k] * mu.hankel_entry(k);
  return s;
}

std::vector<double> normalize(std::span<const double> c, const MomentVector& mu) {
  const double z2 = norm_squared(c, mu);
  if (!(z2 > 0.0) || !std::isfinite(z2)) {
    throw Error(ErrorCode::NonPositiveNorm, "normalize: z^2 = " + std::to_string(z2) + " is not positive");
  }
  const double z = std::sqrt(z2);
  std::vector<double> out(c.begin(), c.end());
  for (auto& v : out) v /= z;
  return out;
}

HankelState hankel_base(const MomentVector& mu) {
  require_extent(mu, 0, "hankel_base");
  const double m0 = mu.hankel_entry(0);
  if (!(m0 > 0.0)) throw RankDeficientError(1, "hankel_base: zero signal power");
  HankelState s;
  s.p = 2;
  s.inverse = RealMatrix(1, 1, 1.0 / m0);
  s.pivot = m0;
  s.monic = {1.0};
  return s;
}

HankelState schur_extend(const HankelState& state, const MomentVector& mu) {
  const std::size_t n = static_cast<std::size_t>(state.p - 1);
  require_extent(mu, 2 * n, "schur_extend");
  std::uint64_t flops = 0;

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = mu.hankel_entry(n + i);
  std::vector<double> ut(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += state.inverse(i, j) * u[j];
    ut[i] = acc;
  }
  flops += n * n;
  const double diag = mu.hankel_entry(2 * n);
  double s = diag;
  for (std::size_t i = 0; i < n; ++i) s -= u[i] * ut[i];
  flops += n;
  if (!(s > kRankTolerance * diag)) {
    throw RankDeficientError(state.p, "schur_extend: pivot " + std::to_string(s) + " at order " +
                                          std::to_string(state.p) + " below rank tolerance");
  }

  HankelState next;
  next.p = state.p + 1;
  next.pivot = s;
  next.inverse = RealMatrix(n + 1, n + 1);
  const double inv_s = 1.0 / s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next.inverse(i, j) = state.inverse(i, j) + ut[i] * ut[j] * inv_s;
    next.inverse(i, n) = -ut[i] * inv_s;
    next.inverse(n, i) = -ut[i] * inv_s;
  }
  next.inverse(n, n) = inv_s;
  flops += n * n + n;
  next.monic.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) next.monic[i] = -ut[i];
  next.monic[n] = 1.0;
  next.flops = flops;
  return next;
}

namespace {

OrthonormalBasis build_common(const MomentVector& mu, int max_order, BasisFamily family) {
  OrthonormalBasis basis;
  basis.family = family;
  basis.max_order = max_order;
  basis.moments = mu;
  const int want = basis.requested_rank();
  require_extent(mu, static_cast<std::size_t>(2 * (want - 1)), "build_basis");

  HankelState state;
  try {
    state = hankel_base(mu);
  } catch (const RankDeficientError&) {
    throw Error(ErrorCode::NonPositiveNorm, "build_basis: signal has zero power");
  }
  basis.monic.push_back({1.0});
  basis.norm_sq.push_back(mu.hankel_entry(0));
  basis.coeffs.push_back(normalize(basis.monic.back(), mu));

  for (int j = 2; j <= want; ++j) {
    try {
      state = schur_extend(state, mu);
    } catch (const RankDeficientError&) {
      break;
    }
    const double z2 = norm_squared(state.monic, mu);
    if (!(z2 > kRankTolerance * mu.hankel_entry(static_cast<std::size_t>(2 * (j - 1))))) break;
    basis.monic.push_back(state.monic);
    basis.norm_sq.push_back(z2);
    basis.coeffs.push_back(normalize(state.monic, mu));
  }
  basis.effective_rank = static_cast<int>(basis.coeffs.size());
  return basis;
}

}  // namespace

OrthonormalBasis build_basis(const MomentVector& mu, int max_order) {
  if (max_order < 1 || max_order % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "build_basis: P must be odd and >= 1");
  }
  if (mu.kind() != MomentKind::EvenOnly) {
    throw Error(ErrorCode::InvalidArgument, "build_basis: odd-only family needs even-only moments");
  }
  return build_common(mu, max_order, BasisFamily::OddOnly);
}

OrthonormalBasis build_extended_basis(const MomentVector& mu, int max_order) {
  if (max_order < 0) throw Error(ErrorCode::InvalidArgument, "build_extended_basis: P must be >= 0");
  if (mu.kind() != MomentKind::AllOrders) {
    throw Error(ErrorCode::InvalidArgument, "build_extended_basis: needs all-orders moments");
  }
  return build_common(mu, max_order, BasisFamily::Extended);
}

void evaluate_regressor(const OrthonormalBasis& basis, Complex x, std::span<Complex> out) {
  const double t = basis.family == BasisFamily::OddOnly ? std::norm(x) : std::abs(x);
  for (int j = 0; j < basis.effective_rank; ++j) {
    const auto& c = basis.coeffs[static_cast<std::size_t>(j)];
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    out[static_cast<std::size_t>(j)] = basis.family == BasisFamily::OddOnly ? x * acc : Complex(acc, 0.0);
  }
}

ComplexVec evaluate_regressor(const OrthonormalBasis& basis, Complex x) {
  ComplexVec out(static_cast<std::size_t>(basis.effective_rank));
  evaluate_regressor(basis, x, out);
  return out;
}

void evaluate_monomials(BasisFamily family, int count, Complex x, std::span<Complex> out) {
  if (family == BasisFamily::OddOnly) {
    const double t = std::norm(x);
    Complex v = x;
    for (int j = 0; j < count; ++j) {
      out[static_cast<std::size_t>(j)] = v;
      v *= t;
    }
  } else {
    const double t = std::abs(x);
    double v = 1.0;
    for (int j = 0; j < count; ++j) {
      out[static_cast<std::size_t>(j)] = v;
      v *= t;
    }
  }
}

RealMatrix change_of_basis(const OrthonormalBasis& basis) {
  const auto r = static_cast<std::size_t>(basis.effective_rank);
  if (r == 0) throw Error(ErrorCode::InvalidArgument, "change_of_basis: empty basis");
  RealMatrix c(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < basis.coeffs[i].size(); ++k) c(i, k) = basis.coeffs[i][k];
  return c;
}

void validate_basis(const OrthonormalBasis& basis, double tol) {
  if (basis.effective_rank < 1 || basis.coeffs.size() != static_cast<std::size_t>(basis.effective_rank)) {
    throw Error(ErrorCode::InvalidArgument, "validate_basis: inconsistent rank");
  }
  for (std::size_t j = 0; j < basis.coeffs.size(); ++j) {
    if (basis.coeffs[j].size() != j + 1) {
      throw Error(ErrorCode::InvalidArgument, "validate_basis: coefficient count of function " +
                                                  std::to_string(j + 1) + " is wrong");
    }
    const double n2 = norm_squared(basis.coeffs[j], basis.moments);
    if (std::abs(n2 - 1.0) > tol) {
      throw Error(ErrorCode::NonPositiveNorm, "validate_basis: function " + std::to_string(j + 1) +
                                                  " has norm^2 " + std::to_string(n2));
    }
  }
}

}  // namespace aopsic
