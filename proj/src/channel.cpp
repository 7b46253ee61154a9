#include "aopsic/channel.hpp"

#include <cmath>

#include "aopsic/error.hpp"

namespace aopsic {

namespace {

bool all_finite(std::span<const Complex> v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace

void SalehPaConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::ConfigError, "PA gamma must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::ConfigError, "PA beta must be >= 0");
  if (taps.empty() || !all_finite(taps)) throw Error(ErrorCode::ConfigError, "PA needs at least one finite tap");
}

void SiChannelConfig::validate() const {
  if (taps.empty() || !all_finite(taps)) throw Error(ErrorCode::ConfigError, "SI channel needs finite taps");
  bool nonzero = false;
  for (const auto& t : taps) nonzero = nonzero || std::abs(t) > 0.0;
  if (!nonzero) throw Error(ErrorCode::ConfigError, "SI channel taps are all zero");
}

void NonlinearSystem::validate() const {
  pa.validate();
  si.validate();
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw Error(ErrorCode::ConfigError, "noise variance must be finite and >= 0");
  }
}

ComplexVec fir(std::span<const Complex> x, std::span<const Complex> taps) {
  ComplexVec out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    Complex acc = 0.0;
    const std::size_t m_end = std::min(taps.size(), n + 1);
    for (std::size_t m = 0; m < m_end; ++m) acc += taps[m] * x[n - m];
    out[n] = acc;
  }
  return out;
}

ComplexVec saleh_pa(std::span<const Complex> x, const SalehPaConfig& cfg) {
  ComplexVec stage(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) stage[n] = cfg.gamma * x[n] / (1.0 + cfg.beta * std::norm(x[n]));
  return fir(stage, cfg.taps);
}

ComplexVec si_signal(std::span<const Complex> x, const NonlinearSystem& sys) {
  return fir(saleh_pa(x, sys.pa), sys.si.taps);
}

ComplexVec simulate_rx(std::span<const Complex> x, const NonlinearSystem& sys, Rng& rng) {
  auto y = si_signal(x, sys);
  if (sys.noise_variance > 0.0)
    for (auto& v : y) v += rng.complex_normal(sys.noise_variance);
  return y;
}

double measure_si_power(std::span<const Complex> x, const NonlinearSystem& sys) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "measure_si_power: empty input");
  const auto s = si_signal(x, sys);
  double p = 0.0;
  for (const auto& v : s) p += std::norm(v);
  p /= static_cast<double>(s.size());
  if (!(p > 0.0)) throw Error(ErrorCode::ZeroSiPower, "received SI power is zero");
  return p;
}

double calibrate_noise(const NonlinearSystem& sys, std::span<const Complex> x, double si_to_noise_db) {
  if (!std::isfinite(si_to_noise_db)) throw Error(ErrorCode::InvalidArgument, "calibrate_noise: target not finite");
  return measure_si_power(x, sys) * std::pow(10.0, -si_to_noise_db / 10.0);
}

ComplexVec random_taps(Rng& rng, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "random_taps: need at least one tap");
  auto h = rng_complex_gaussian(rng, m, 1.0);
  double e = 0.0;
  for (const auto& v : h) e += std::norm(v);
  const double s = 1.0 / std::sqrt(e);
  for (auto& v : h) v *= s;
  return h;
}

ComplexVec si_signal_piecewise(std::span<const Complex> x, std::span<const NonlinearSystem> systems,
                               std::span<const std::size_t> switches) {
  if (systems.size() != switches.size() + 1) {
    throw Error(ErrorCode::InvalidArgument, "si_signal_piecewise: need one more system than switch points");
  }
  ComplexVec out(x.size());
  for (std::size_t k = 0; k < systems.size(); ++k) {
    const std::size_t lo = k == 0 ? 0 : switches[k - 1];
    const std::size_t hi = k < switches.size() ? switches[k] : x.size();
    if (lo >= hi) continue;
    const auto s = si_signal(x.first(hi), systems[k]);
    for (std::size_t n = lo; n < hi; ++n) out[n] = s[n];
  }
  return out;
}

}  // namespace aopsic
