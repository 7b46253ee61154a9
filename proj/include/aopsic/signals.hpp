#pragma once

#include <string>
#include <vector>

#include "aopsic/numerics.hpp"

namespace aopsic {

struct DistributionSpec {
  enum class Kind { ComplexGaussian, UniformReal, Exponential, Qam, Mixture };

  Kind kind = Kind::ComplexGaussian;
  double param = 1.0;  // variance, half width or rate depending on kind
  int qam_order = 16;
  std::vector<DistributionSpec> components;
  bool unit_power = false;

  static DistributionSpec complex_gaussian(double variance);
  static DistributionSpec uniform_real(double half_width);
  static DistributionSpec exponential(double rate);
  static DistributionSpec qam(int order);
  static DistributionSpec mixture(std::vector<DistributionSpec> parts);

  /// E|x|^2 of one draw, after any unit-power scaling.
  double power() const;
  void validate() const;
};

struct Waveform {
  enum class Kind { Direct, Ofdm, Scfde };
  Kind kind = Kind::Direct;
  int n_subcarriers = 64;

  void validate() const;
};

/// One IID sample.
Complex draw(const DistributionSpec& spec, Rng& rng);

ComplexVec generate(const DistributionSpec& spec, std::size_t n, Rng& rng);

/// Unitary inverse FFT over consecutive blocks of n_sub symbols.
ComplexVec frame_ofdm(std::span<const Complex> symbols, std::size_t n_sub);

struct Segment {
  DistributionSpec dist;
  Waveform waveform;
  std::size_t duration = 0;
  std::string mcs_id;            // LUT key; may be empty
  bool redraw_channel = false;   // new channel realization at segment start
};

struct SegmentSchedule {
  std::vector<Segment> segments;
  std::vector<std::size_t> channel_redraws;  // extra redraw sample indices

  std::size_t length() const noexcept;
  void validate() const;
};

struct McsMarker {
  std::size_t start = 0;
  std::string mcs_id;
};

struct ScheduleStream {
  ComplexVec samples;
  std::vector<std::size_t> boundaries;      // start index of every segment but the first
  std::vector<std::size_t> channel_redraws; // sorted, unique, excludes 0
  std::vector<McsMarker> mcs;               // one per segment
};

/// Concatenates every segment's samples. OFDM segments are framed in whole
/// blocks and truncated to the segment duration.
ScheduleStream build_schedule_stream(const SegmentSchedule& schedule, Rng& rng);

}  // namespace aopsic
