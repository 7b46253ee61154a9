#pragma once

#include <span>
#include <vector>

#include "aopsic/numerics.hpp"

namespace aopsic {

struct SalehPaConfig {
  double gamma = 3.0;
  double beta = 0.09;
  ComplexVec taps{Complex(1.0, 0.0)};

  void validate() const;
};

struct SiChannelConfig {
  ComplexVec taps{Complex(1.0, 0.0)};

  void validate() const;
};

struct NonlinearSystem {
  SalehPaConfig pa;
  SiChannelConfig si;
  double noise_variance = 0.0;

  /// Combined memory M + Q - 1.
  std::size_t memory() const noexcept { return pa.taps.size() + si.taps.size() - 1; }
  void validate() const;
};

/// x_PA[n] = sum_m h[m] * gamma x[n-m] / (1 + beta |x[n-m]|^2), zero before n = 0.
ComplexVec saleh_pa(std::span<const Complex> x, const SalehPaConfig& cfg);

/// Causal FIR filter, output truncated to the input length.
ComplexVec fir(std::span<const Complex> x, std::span<const Complex> taps);

/// Noiseless received SI: fir(h_SI, saleh_pa(x)).
ComplexVec si_signal(std::span<const Complex> x, const NonlinearSystem& sys);

/// si_signal plus complex Gaussian noise of the system's variance.
ComplexVec simulate_rx(std::span<const Complex> x, const NonlinearSystem& sys, Rng& rng);

/// Mean power of si_signal over x. ZeroSiPower when it is zero.
double measure_si_power(std::span<const Complex> x, const NonlinearSystem& sys);

/// Noise variance giving the requested SI-to-noise ratio for this input.
double calibrate_noise(const NonlinearSystem& sys, std::span<const Complex> x, double si_to_noise_db);

/// M complex Gaussian taps scaled to unit total energy.
ComplexVec random_taps(Rng& rng, std::size_t m);

/// Noiseless output when the system switches at the given sample indices.
/// systems.size() == switches.size() + 1; every system sees the whole input
/// history, so the switch changes the channel, not the signal.
ComplexVec si_signal_piecewise(std::span<const Complex> x, std::span<const NonlinearSystem> systems,
                               std::span<const std::size_t> switches);

}  // namespace aopsic
