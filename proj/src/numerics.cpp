#include "aopsic/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "aopsic/error.hpp"

namespace aopsic {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyConstellation: return "EmptyConstellation";
    case ErrorCode::InsufficientMoments: return "InsufficientMoments";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonPositiveNorm: return "NonPositiveNorm";
    case ErrorCode::ZeroSiPower: return "ZeroSiPower";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::UnknownMcs: return "UnknownMcs";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "RealMatrix: dimensions must be >= 1");
  }
}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "RealMatrix: dimensions must be >= 1");
  }
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "RealMatrix: entry count does not match rows*cols");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "RealMatrix: non-finite entry");
  }
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double RealMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

RealMatrix RealMatrix::operator*(const RealMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error(ErrorCode::InvalidArgument, "RealMatrix: shape mismatch");
  RealMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::vector<double> RealMatrix::operator*(std::span<const double> v) const {
  if (v.size() != cols_) throw Error(ErrorCode::InvalidArgument, "RealMatrix: vector length mismatch");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

SolveResult solve_symmetric(const RealMatrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::InvalidArgument, "solve_symmetric: matrix is not square");
  if (b.size() != n) throw Error(ErrorCode::InvalidArgument, "solve_symmetric: rhs length mismatch");

  // LU with partial pivoting, multipliers stored below the diagonal.
  const double threshold = kPivotTolerance * a.max_abs();
  std::vector<double> m(a.entries().begin(), a.entries().end());
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  auto at = [&](std::size_t r, std::size_t c) -> double& { return m[r * n + c]; };

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(at(r, k)) > std::abs(at(piv, k))) piv = r;
    if (!(std::abs(at(piv, k)) > threshold)) {
      std::ostringstream os;
      os << "solve_symmetric: pivot " << at(piv, k) << " at step " << k << " below tolerance";
      throw Error(ErrorCode::SingularMatrix, os.str());
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(piv, c));
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = at(r, k) / at(k, k);
      at(r, k) = f;
      if (f == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) at(r, c) -= f * at(k, c);
    }
  }

  auto lu_solve = [&](const std::vector<double>& rhs) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = rhs[perm[i]];
      for (std::size_t c = 0; c < i; ++c) acc -= at(i, c) * y[c];
      y[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
      double acc = y[i];
      for (std::size_t c = i + 1; c < n; ++c) acc -= at(i, c) * y[c];
      y[i] = acc / at(i, i);
    }
    return y;
  };
  // Residual in extended precision; drives the refinement and the report.
  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    long double norm = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      long double acc = -static_cast<long double>(b[i]);
      for (std::size_t c = 0; c < n; ++c) acc += static_cast<long double>(a(i, c)) * x[c];
      r[i] = static_cast<double>(acc);
      norm += acc * acc;
    }
    return static_cast<double>(std::sqrt(norm));
  };

  std::vector<double> x = lu_solve(std::vector<double>(b.begin(), b.end()));
  std::vector<double> r(n);
  double res = residual(x, r);
  for (int iter = 0; iter < 4 && res > 0.0; ++iter) {
    const auto d = lu_solve(r);
    std::vector<double> trial(n);
    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - d[i];
    std::vector<double> rt(n);
    const double res_t = residual(trial, rt);
    if (!(res_t < res)) break;
    x = std::move(trial);
    r = std::move(rt);
    res = res_t;
  }
  // At high condition numbers the rounding of x itself dominates the residual;
  // a few one-ulp coordinate moves recover most of it for small systems.
  if (n <= 16) {
    std::vector<double> rt(n);
    for (int sweep = 0; sweep < 4 && res > 0.0; ++sweep) {
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (double dir : {1.0, -1.0}) {
          const double keep = x[i];
          x[i] = std::nextafter(keep, dir * std::numeric_limits<double>::infinity());
          const double res_t = residual(x, rt);
          if (res_t < res) {
            res = res_t;
            moved = true;
          } else {
            x[i] = keep;
          }
        }
      }
      if (!moved) break;
    }
  }
  return {std::move(x), res};
}

RealMatrix invert_symmetric(const RealMatrix& a) {
  const std::size_t n = a.rows();
  RealMatrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = solve_symmetric(a, e).x;
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> self_convolve(std::span<const double> c) {
  if (c.empty()) throw Error(ErrorCode::InvalidArgument, "self_convolve: empty input");
  return convolve(c, c);
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

namespace {

ComplexVec transform(std::span<const Complex> x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::BadLength, "fft: length " + std::to_string(n) + " is not a power of two");
  }
  ComplexVec a(x.begin(), x.end());
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const Complex w = std::polar(1.0, ang * static_cast<double>(k));
      for (std::size_t i = k; i < n; i += len) {
        const Complex u = a[i];
        const Complex v = a[i + half] * w;
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : a) v *= scale;
  return a;
}

}  // namespace

ComplexVec fft(std::span<const Complex> x) { return transform(x, false); }
ComplexVec ifft(std::span<const Complex> x) { return transform(x, true); }

RealMatrix cholesky(const RealMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::InvalidArgument, "cholesky: matrix is not square");
  RealMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky: pivot " + std::to_string(d) + " at column " + std::to_string(j));
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

ComplexMatrix cholesky_hermitian(const ComplexMatrix& a) {
  const std::size_t n = a.size();
  ComplexMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky_hermitian: pivot " + std::to_string(d) + " at column " + std::to_string(j));
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j).real();
    }
  }
  return l;
}

ComplexMatrix invert_lower(const ComplexMatrix& l) {
  const std::size_t n = l.size();
  ComplexMatrix inv(n);
  for (std::size_t c = 0; c < n; ++c) {
    inv(c, c) = 1.0 / l(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      Complex s = 0.0;
      for (std::size_t k = c; k < r; ++k) s += l(r, k) * inv(k, c);
      inv(r, c) = -s / l(r, r);
    }
  }
  return inv;
}

Rng::Rng(RngState state) : state_(state) {
  std::seed_seq seq{static_cast<std::uint32_t>(state.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(state.seed >> 32), state.stream,
                    0x9e3779b9u};
  engine_.seed(seq);
}

double Rng::uniform() { return std::generate_canonical<double, 53>(engine_); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(engine_);
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

ComplexVec rng_complex_gaussian(Rng& rng, std::size_t n, double variance) {
  if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "rng_complex_gaussian: variance must be > 0");
  ComplexVec out(n);
  for (auto& v : out) v = rng.complex_normal(variance);
  return out;
}

}  // namespace aopsic
