#pragma once

#include <span>
#include <vector>

#include "aopsic/numerics.hpp"

namespace aopsic {

enum class MomentKind {
  EvenOnly,   // values[m-1] = E|x|^{2m}
  AllOrders,  // values[m-1] = E|x|^m
};

/// Absolute moments of a signal. Immutable once built.
class MomentVector {
 public:
  MomentVector() = default;
  MomentVector(MomentKind kind, std::vector<double> values);

  MomentKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t max_index() const noexcept { return values_.size(); }

  /// E|x|^{2m} for even-only, E|x|^m for all-orders; m is 1-based.
  double at(std::size_t m) const;

  /// Unified Hankel entry used by basis construction. For even-only vectors
  /// this is E|x|^{2(k+1)}, for all-orders it is E|x|^k with E|x|^0 = 1.
  double hankel_entry(std::size_t k) const;

  /// Largest k for which hankel_entry(k) is available.
  std::size_t hankel_extent() const noexcept;

 private:
  MomentKind kind_ = MomentKind::EvenOnly;
  std::vector<double> values_;
};

MomentVector estimate_moments(std::span<const Complex> samples, std::size_t k, MomentKind kind);
MomentVector gaussian_moments(double variance, std::size_t k);
MomentVector uniform_moments(double half_width, std::size_t k);
MomentVector exponential_moments(double rate, std::size_t k, MomentKind kind);
MomentVector qam_moments(std::span<const Complex> constellation, std::size_t k);
MomentVector scale_moments(const MomentVector& mu, double sigma);

/// Square QAM points, Gray mapped, scaled to unit average power.
/// order must be 4, 16, 64 or 256.
ComplexVec qam_constellation(int order);

}  // namespace aopsic
