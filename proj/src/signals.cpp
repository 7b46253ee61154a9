#include "aopsic/signals.hpp"

#include <algorithm>
#include <cmath>

#include "aopsic/error.hpp"
#include "aopsic/moments.hpp"

namespace aopsic {

DistributionSpec DistributionSpec::complex_gaussian(double variance) {
  DistributionSpec s;
  s.kind = Kind::ComplexGaussian;
  s.param = variance;
  return s;
}

DistributionSpec DistributionSpec::uniform_real(double half_width) {
  DistributionSpec s;
  s.kind = Kind::UniformReal;
  s.param = half_width;
  return s;
}

DistributionSpec DistributionSpec::exponential(double rate) {
  DistributionSpec s;
  s.kind = Kind::Exponential;
  s.param = rate;
  return s;
}

DistributionSpec DistributionSpec::qam(int order) {
  DistributionSpec s;
  s.kind = Kind::Qam;
  s.qam_order = order;
  return s;
}

DistributionSpec DistributionSpec::mixture(std::vector<DistributionSpec> parts) {
  DistributionSpec s;
  s.kind = Kind::Mixture;
  s.components = std::move(parts);
  return s;
}

namespace {

double raw_power(const DistributionSpec& s) {
  switch (s.kind) {
    case DistributionSpec::Kind::ComplexGaussian: return s.param;
    case DistributionSpec::Kind::UniformReal: return s.param * s.param / 3.0;
    case DistributionSpec::Kind::Exponential: return 2.0 / (s.param * s.param);
    case DistributionSpec::Kind::Qam: return 1.0;
    case DistributionSpec::Kind::Mixture: {
      double p = 0.0;
      for (const auto& c : s.components) p += c.power();
      return p;
    }
  }
  return 1.0;
}

const ComplexVec& cached_constellation(int order) {
  static const ComplexVec q4 = qam_constellation(4);
  static const ComplexVec q16 = qam_constellation(16);
  static const ComplexVec q64 = qam_constellation(64);
  static const ComplexVec q256 = qam_constellation(256);
  switch (order) {
    case 4: return q4;
    case 16: return q16;
    case 64: return q64;
    default: return q256;
  }
}

}  // namespace

double DistributionSpec::power() const { return unit_power ? 1.0 : raw_power(*this); }

void DistributionSpec::validate() const {
  switch (kind) {
    case Kind::ComplexGaussian:
    case Kind::UniformReal:
    case Kind::Exponential:
      if (!(param > 0.0) || !std::isfinite(param)) {
        throw Error(ErrorCode::ConfigError, "distribution parameter must be finite and > 0");
      }
      break;
    case Kind::Qam:
      if (qam_order != 4 && qam_order != 16 && qam_order != 64 && qam_order != 256) {
        throw Error(ErrorCode::ConfigError, "qam order must be one of 4, 16, 64, 256");
      }
      break;
    case Kind::Mixture:
      if (components.empty()) throw Error(ErrorCode::ConfigError, "mixture needs at least one component");
      for (const auto& c : components) c.validate();
      break;
  }
}

void Waveform::validate() const {
  if (kind == Kind::Ofdm && (n_subcarriers < 1 || !is_power_of_two(static_cast<std::size_t>(n_subcarriers)))) {
    throw Error(ErrorCode::ConfigError, "ofdm subcarrier count must be a power of two");
  }
}

Complex draw(const DistributionSpec& spec, Rng& rng) {
  Complex v;
  switch (spec.kind) {
    case DistributionSpec::Kind::ComplexGaussian:
      v = rng.complex_normal(spec.param);
      break;
    case DistributionSpec::Kind::UniformReal:
      v = {rng.uniform(-spec.param, spec.param), 0.0};
      break;
    case DistributionSpec::Kind::Exponential:
      v = {-std::log1p(-rng.uniform()) / spec.param, 0.0};
      break;
    case DistributionSpec::Kind::Qam: {
      const auto& pts = cached_constellation(spec.qam_order);
      v = pts[rng.index(pts.size())];
      break;
    }
    case DistributionSpec::Kind::Mixture:
      v = 0.0;
      for (const auto& c : spec.components) v += draw(c, rng);
      break;
  }
  if (spec.unit_power) v /= std::sqrt(raw_power(spec));
  return v;
}

ComplexVec generate(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  ComplexVec out(n);
  for (auto& v : out) v = draw(spec, rng);
  return out;
}

ComplexVec frame_ofdm(std::span<const Complex> symbols, std::size_t n_sub) {
  if (n_sub == 0 || symbols.size() % n_sub != 0) {
    throw Error(ErrorCode::BadLength, "frame_ofdm: symbol count " + std::to_string(symbols.size()) +
                                          " is not a multiple of " + std::to_string(n_sub));
  }
  ComplexVec out;
  out.reserve(symbols.size());
  for (std::size_t b = 0; b < symbols.size(); b += n_sub) {
    const auto block = ifft(symbols.subspan(b, n_sub));
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::size_t SegmentSchedule::length() const noexcept {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.duration;
  return n;
}

void SegmentSchedule::validate() const {
  if (segments.empty()) throw Error(ErrorCode::ConfigError, "schedule has no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].duration < 1) {
      throw Error(ErrorCode::ConfigError, "schedule segment " + std::to_string(i) + " has zero duration");
    }
    segments[i].dist.validate();
    segments[i].waveform.validate();
  }
  const std::size_t n = length();
  for (std::size_t r : channel_redraws) {
    if (r >= n) throw Error(ErrorCode::ConfigError, "channel redraw index " + std::to_string(r) + " beyond schedule");
  }
}

ScheduleStream build_schedule_stream(const SegmentSchedule& schedule, Rng& rng) {
  schedule.validate();
  ScheduleStream out;
  out.samples.reserve(schedule.length());
  for (const auto& seg : schedule.segments) {
    const std::size_t start = out.samples.size();
    if (start > 0) out.boundaries.push_back(start);
    if (seg.redraw_channel && start > 0) out.channel_redraws.push_back(start);
    out.mcs.push_back({start, seg.mcs_id});
    if (seg.waveform.kind == Waveform::Kind::Ofdm) {
      const auto nsub = static_cast<std::size_t>(seg.waveform.n_subcarriers);
      const std::size_t blocks = (seg.duration + nsub - 1) / nsub;
      const auto symbols = generate(seg.dist, blocks * nsub, rng);
      const auto framed = frame_ofdm(symbols, nsub);
      out.samples.insert(out.samples.end(), framed.begin(), framed.begin() + static_cast<std::ptrdiff_t>(seg.duration));
    } else {
      const auto s = generate(seg.dist, seg.duration, rng);
      out.samples.insert(out.samples.end(), s.begin(), s.end());
    }
  }
  for (std::size_t r : schedule.channel_redraws)
    if (r > 0) out.channel_redraws.push_back(r);
  std::sort(out.channel_redraws.begin(), out.channel_redraws.end());
  out.channel_redraws.erase(std::unique(out.channel_redraws.begin(), out.channel_redraws.end()),
                            out.channel_redraws.end());
  return out;
}

}  // namespace aopsic
