#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aopsic/basis_io.hpp"
#include "aopsic/numerics.hpp"
#include "aopsic/orthopoly.hpp"
#include "aopsic/signals.hpp"

namespace aopsic {

enum class Algorithm {
  Aop,         // basis rebuilt from moments estimated online
  Hp,          // raw monomials with per-order step normalization
  Ih,          // fixed basis of the complex Gaussian
  HpWhitened,  // monomials whitened by an estimated covariance
  Lut,         // basis looked up per MCS marker
};

/// What happens to the adaptive weights when the basis changes.
enum class WeightCarry {
  Remap,  // keep the modelled function: h' = T_new^-H T_old^H h
  Keep,   // leave the raw coefficients untouched
  Reset,  // start again from zero
};

const char* to_string(Algorithm a) noexcept;
const char* to_string(WeightCarry c) noexcept;
Algorithm algorithm_from_string(const std::string& s);
WeightCarry weight_carry_from_string(const std::string& s);

struct CancellerConfig {
  Algorithm algorithm = Algorithm::Aop;
  std::string name;
  int order = 7;           // P, odd
  int taps = 9;            // L
  int precursor = 0;       // taps looking ahead of the current sample
  double mu_step = 0.02;
  double guard = 3.0;      // step clamp relative to nominal regressor energy; <= 0 disables
  std::size_t n_max = 55;  // samples collected per window
  std::size_t n_int = 0;   // window spacing; 0 means one window for the whole run
  std::size_t n_cov = 0;   // HP-W collection length; 0 means n_max
  double ridge = 1e-9;     // HP-W diagonal loading relative to mean covariance diagonal
  std::optional<WeightCarry> carry;  // default depends on the algorithm
  double ih_variance = 1.0;

  WeightCarry effective_carry() const noexcept;
  std::string display_name() const;
  void validate() const;
};

inline constexpr double kDivergenceBound = 1e6;

/// Concatenation over orders of [phi_p(x[n]), ..., phi_p(x[n-L+1])].
/// window[l] holds x[n-l].
ComplexVec make_regressor(std::span<const Complex> window, const OrthonormalBasis& basis);

struct LmsState {
  ComplexVec weights;
};

/// e = y - h^H phi, then h += mu phi e*. Throws Diverged when ||h|| exceeds
/// kDivergenceBound or stops being finite.
Complex lms_step(LmsState& state, std::span<const Complex> phi, Complex y, double mu);

/// Same with one step size per weight.
Complex lms_step(LmsState& state, std::span<const Complex> phi, Complex y, std::span<const double> mu);

/// Sample-by-sample canceller. The full transmit stream is supplied so that
/// pre-cursor taps can look ahead.
class CancellerEngine {
 public:
  CancellerEngine(CancellerConfig cfg, const McsLut* lut = nullptr);

  /// Cancels y[n]; returns the residual.
  Complex process(std::span<const Complex> x, std::size_t n, Complex y);

  /// Switches to the LUT basis for id (Lut algorithm only). UnknownMcs if absent.
  void set_mcs(const std::string& id);

  int rank() const noexcept { return rank_; }
  std::size_t rebuild_count() const noexcept { return rebuilds_; }
  const CancellerConfig& config() const noexcept { return cfg_; }

  /// Weights expressed over raw monomials, order-major (r_max x L).
  ComplexVec monomial_weights() const;

  /// Per-sample transform from monomials to the current regressor basis.
  const ComplexMatrix& transform() const noexcept { return t_; }

 private:
  // moments, when given, describe the new input distribution and let a rank
  // drop project the old function instead of truncating it.
  void install(const ComplexMatrix& t, int rank, WeightCarry carry, const MomentVector* moments = nullptr);
  void track(Complex x, std::size_t n);
  bool rebuild_aop();
  bool rebuild_whitened();

  CancellerConfig cfg_;
  const McsLut* lut_;
  int r_max_;
  int rank_ = 0;
  ComplexMatrix t_;
  ComplexVec h_;            // r_max x L, order-major
  std::vector<double> nominal_;
  std::size_t rebuilds_ = 0;

  // moment / covariance collection for the current window
  std::size_t window_start_ = 0;
  std::size_t collected_ = 0;
  bool have_basis_ = false;
  std::vector<long double> moment_sums_;
  ComplexVec mean_sum_;
  std::vector<std::complex<long double>> cov_sum_;
  std::vector<long double> hp_power_sum_;
  std::size_t hp_count_ = 0;

  ComplexVec mono_;
  ComplexVec phi_;
  std::vector<double> step_;
};

struct RunTrace {
  ComplexVec error;
  bool diverged = false;
  std::size_t diverged_at = 0;
  int final_rank = 0;
  std::size_t rebuilds = 0;
  ComplexVec monomial_weights;
};

/// Runs one canceller over a stream. Divergence stops adaptation: the trace
/// records the sample and the residual equals y from there on.
RunTrace run_canceller(const CancellerConfig& cfg, std::span<const Complex> x, std::span<const Complex> y,
                       std::span<const McsMarker> markers = {}, const McsLut* lut = nullptr);

RunTrace run_aop(std::span<const Complex> x, std::span<const Complex> y, CancellerConfig cfg);
RunTrace run_fixed(std::span<const Complex> x, std::span<const Complex> y, Algorithm kind, CancellerConfig cfg);
RunTrace run_whitened(std::span<const Complex> x, std::span<const Complex> y, CancellerConfig cfg);
RunTrace run_lut(std::span<const Complex> x, std::span<const Complex> y, const McsLut& lut,
                 std::span<const McsMarker> markers, CancellerConfig cfg);

/// Sliding mean of |e|^2 over W samples relative to reference power, in dB.
/// The first W-1 entries average over the samples available so far.
std::vector<double> mse_trace(std::span<const Complex> e, std::size_t window, double reference_power);

/// Same for an already squared, already normalized sequence.
std::vector<double> mse_trace_power(std::span<const double> power, std::size_t window);

}  // namespace aopsic
