#include "aopsic/moments.hpp"

#include <cmath>
#include <string>

#include "aopsic/error.hpp"

namespace aopsic {

MomentVector::MomentVector(MomentKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "MomentVector: moments must be finite and non-negative");
    }
  }
}

double MomentVector::at(std::size_t m) const {
  if (m == 0 || m > values_.size()) {
    throw Error(ErrorCode::InsufficientMoments,
                "MomentVector: index " + std::to_string(m) + " not available (max " +
                    std::to_string(values_.size()) + ")");
  }
  return values_[m - 1];
}

double MomentVector::hankel_entry(std::size_t k) const {
  if (kind_ == MomentKind::EvenOnly) return at(k + 1);
  return k == 0 ? 1.0 : at(k);
}

std::size_t MomentVector::hankel_extent() const noexcept {
  if (kind_ == MomentKind::EvenOnly) return values_.empty() ? 0 : values_.size() - 1;
  return values_.size();
}

MomentVector estimate_moments(std::span<const Complex> samples, std::size_t k, MomentKind kind) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "estimate_moments: no samples");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "estimate_moments: K must be >= 1");
  std::vector<long double> acc(k, 0.0L);
  for (const Complex& x : samples) {
    const long double base = kind == MomentKind::EvenOnly ? std::norm(x) : std::abs(x);
    long double pw = 1.0L;
    for (std::size_t m = 0; m < k; ++m) {
      pw *= base;
      acc[m] += pw;
    }
  }
  std::vector<double> out(k);
  const long double n = static_cast<long double>(samples.size());
  for (std::size_t m = 0; m < k; ++m) out[m] = static_cast<double>(acc[m] / n);
  return {kind, std::move(out)};
}

MomentVector gaussian_moments(double variance, std::size_t k) {
  if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian_moments: variance must be > 0");
  std::vector<double> out(k);
  double v = 1.0;
  for (std::size_t m = 1; m <= k; ++m) {
    v *= variance * static_cast<double>(m);
    out[m - 1] = v;
  }
  return {MomentKind::EvenOnly, std::move(out)};
}

MomentVector uniform_moments(double half_width, std::size_t k) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "uniform_moments: half width must be > 0");
  std::vector<double> out(k);
  for (std::size_t m = 1; m <= k; ++m) {
    out[m - 1] = std::pow(half_width, 2.0 * static_cast<double>(m)) / (2.0 * static_cast<double>(m) + 1.0);
  }
  return {MomentKind::EvenOnly, std::move(out)};
}

MomentVector exponential_moments(double rate, std::size_t k, MomentKind kind) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponential_moments: rate must be > 0");
  const std::size_t step = kind == MomentKind::EvenOnly ? 2 : 1;
  std::vector<double> out(k);
  double v = 1.0;
  std::size_t order = 0;
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t s = 0; s < step; ++s) {
      ++order;
      v *= static_cast<double>(order) / rate;
    }
    out[m] = v;
  }
  return {kind, std::move(out)};
}

MomentVector qam_moments(std::span<const Complex> constellation, std::size_t k) {
  if (constellation.empty()) throw Error(ErrorCode::EmptyConstellation, "qam_moments: empty constellation");
  return estimate_moments(constellation, k, MomentKind::EvenOnly);
}

MomentVector scale_moments(const MomentVector& mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale_moments: scale must be > 0");
  const double per_index = mu.kind() == MomentKind::EvenOnly ? sigma * sigma : sigma;
  std::vector<double> out(mu.values().begin(), mu.values().end());
  double f = 1.0;
  for (auto& v : out) {
    f *= per_index;
    v *= f;
  }
  return {mu.kind(), std::move(out)};
}

ComplexVec qam_constellation(int order) {
  int side = 0;
  switch (order) {
    case 4: side = 2; break;
    case 16: side = 4; break;
    case 64: side = 8; break;
    case 256: side = 16; break;
    default:
      throw Error(ErrorCode::InvalidArgument, "qam_constellation: unsupported order " + std::to_string(order));
  }
  // Gray index g maps to amplitude level; average power of a side x side grid
  // with levels +-1, +-3, ... is 2(side^2 - 1)/3.
  const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  std::vector<double> level(side);
  for (int b = 0; b < side; ++b) {
    const int g = b ^ (b >> 1);
    level[g] = (2.0 * b - side + 1) * scale;
  }
  ComplexVec pts;
  pts.reserve(static_cast<std::size_t>(order));
  for (int i = 0; i < side; ++i)
    for (int q = 0; q < side; ++q) pts.emplace_back(level[i], level[q]);
  return pts;
}

}  // namespace aopsic
