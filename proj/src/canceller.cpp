#include "aopsic/canceller.hpp"

#include <algorithm>
#include <cmath>

#include "aopsic/error.hpp"
#include "aopsic/moments.hpp"

namespace aopsic {

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Aop: return "aop";
    case Algorithm::Hp: return "hp";
    case Algorithm::Ih: return "ih";
    case Algorithm::HpWhitened: return "hpw";
    case Algorithm::Lut: return "lut";
  }
  return "unknown";
}

const char* to_string(WeightCarry c) noexcept {
  switch (c) {
    case WeightCarry::Remap: return "remap";
    case WeightCarry::Keep: return "keep";
    case WeightCarry::Reset: return "reset";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  for (auto a : {Algorithm::Aop, Algorithm::Hp, Algorithm::Ih, Algorithm::HpWhitened, Algorithm::Lut})
    if (s == to_string(a)) return a;
  throw Error(ErrorCode::ConfigError, "unknown algorithm '" + s + "' (expected aop, hp, ih, hpw or lut)");
}

WeightCarry weight_carry_from_string(const std::string& s) {
  for (auto c : {WeightCarry::Remap, WeightCarry::Keep, WeightCarry::Reset})
    if (s == to_string(c)) return c;
  throw Error(ErrorCode::ConfigError, "unknown weight carry '" + s + "' (expected remap, keep or reset)");
}

WeightCarry CancellerConfig::effective_carry() const noexcept {
  if (carry) return *carry;
  return algorithm == Algorithm::Aop || algorithm == Algorithm::Lut ? WeightCarry::Remap : WeightCarry::Keep;
}

std::string CancellerConfig::display_name() const { return name.empty() ? to_string(algorithm) : name; }

void CancellerConfig::validate() const {
  const std::string who = "canceller '" + display_name() + "': ";
  if (order < 1 || order % 2 == 0) throw Error(ErrorCode::ConfigError, who + "P must be odd and >= 1");
  if (taps < 1) throw Error(ErrorCode::ConfigError, who + "L must be >= 1");
  if (precursor < 0 || precursor >= taps) throw Error(ErrorCode::ConfigError, who + "precursor must lie in [0, L)");
  if (!(mu_step > 0.0) || !std::isfinite(mu_step)) throw Error(ErrorCode::ConfigError, who + "mu_step must be > 0");
  if (!std::isfinite(guard)) throw Error(ErrorCode::ConfigError, who + "guard must be finite");
  if (algorithm == Algorithm::Aop || algorithm == Algorithm::HpWhitened) {
    if (n_max < 1) throw Error(ErrorCode::ConfigError, who + "N_max must be >= 1");
    const std::size_t collect = algorithm == Algorithm::HpWhitened && n_cov > 0 ? n_cov : n_max;
    if (n_int != 0 && n_int < collect) {
      throw Error(ErrorCode::ConfigError, who + "N_int must be 0 or >= the collection length");
    }
  }
  if (!(ridge > 0.0)) throw Error(ErrorCode::ConfigError, who + "ridge must be > 0");
  if (!(ih_variance > 0.0)) throw Error(ErrorCode::ConfigError, who + "ih_variance must be > 0");
}

ComplexVec make_regressor(std::span<const Complex> window, const OrthonormalBasis& basis) {
  const std::size_t l_taps = window.size();
  const auto r = static_cast<std::size_t>(basis.effective_rank);
  ComplexVec out(l_taps * r);
  ComplexVec v(r);
  for (std::size_t l = 0; l < l_taps; ++l) {
    evaluate_regressor(basis, window[l], v);
    for (std::size_t p = 0; p < r; ++p) out[p * l_taps + l] = v[p];
  }
  return out;
}

namespace {

template <typename StepAt>
Complex lms_update(std::span<Complex> h, std::span<const Complex> phi, Complex y, StepAt step_at) {
  if (h.size() != phi.size()) throw Error(ErrorCode::InvalidArgument, "lms_step: weight/regressor size mismatch");
  Complex yhat = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) yhat += std::conj(h[i]) * phi[i];
  const Complex e = y - yhat;
  const Complex ec = std::conj(e);
  for (std::size_t i = 0; i < phi.size(); ++i) h[i] += step_at(i) * phi[i] * ec;
  return e;
}

void check_divergence(std::span<const Complex> h) {
  double n2 = 0.0;
  for (const auto& v : h) n2 += std::norm(v);
  if (!std::isfinite(n2) || n2 > kDivergenceBound * kDivergenceBound) {
    throw Error(ErrorCode::Diverged, "adaptive weights diverged (norm " + std::to_string(std::sqrt(n2)) + ")");
  }
}

ComplexMatrix to_complex(const RealMatrix& m, std::size_t n) {
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

Complex lms_step(LmsState& state, std::span<const Complex> phi, Complex y, double mu) {
  const Complex e = lms_update(state.weights, phi, y, [mu](std::size_t) { return mu; });
  check_divergence(state.weights);
  return e;
}

Complex lms_step(LmsState& state, std::span<const Complex> phi, Complex y, std::span<const double> mu) {
  if (mu.size() != phi.size()) throw Error(ErrorCode::InvalidArgument, "lms_step: step/regressor size mismatch");
  const Complex e = lms_update(state.weights, phi, y, [mu](std::size_t i) { return mu[i]; });
  check_divergence(state.weights);
  return e;
}

CancellerEngine::CancellerEngine(CancellerConfig cfg, const McsLut* lut)
    : cfg_(std::move(cfg)), lut_(lut), r_max_((cfg_.order + 1) / 2), t_(static_cast<std::size_t>(r_max_)) {
  cfg_.validate();
  const auto r = static_cast<std::size_t>(r_max_);
  const auto l = static_cast<std::size_t>(cfg_.taps);
  h_.assign(r * l, Complex(0.0));
  nominal_.assign(r, 1.0);
  moment_sums_.assign(static_cast<std::size_t>(cfg_.order), 0.0L);
  cov_sum_.assign(r * r, 0.0L);
  hp_power_sum_.assign(r, 0.0L);
  mono_.resize(r);
  phi_.resize(r * l);
  step_.resize(r * l);

  switch (cfg_.algorithm) {
    case Algorithm::Hp: {
      ComplexMatrix eye(r);
      for (std::size_t i = 0; i < r; ++i) eye(i, i) = 1.0;
      install(eye, r_max_, WeightCarry::Reset);
      break;
    }
    case Algorithm::Ih: {
      const auto basis = build_basis(gaussian_moments(cfg_.ih_variance, static_cast<std::size_t>(cfg_.order)),
                                     cfg_.order);
      install(to_complex(change_of_basis(basis), r), basis.effective_rank, WeightCarry::Reset);
      break;
    }
    case Algorithm::Lut:
      if (lut_ == nullptr) throw Error(ErrorCode::ConfigError, "canceller '" + cfg_.display_name() + "': no LUT");
      break;
    default:
      break;
  }
}

void CancellerEngine::install(const ComplexMatrix& t, int rank, WeightCarry carry, const MomentVector* moments) {
  const auto l_taps = static_cast<std::size_t>(cfg_.taps);
  const auto r_old = static_cast<std::size_t>(rank_);
  const auto r_new = static_cast<std::size_t>(rank);
  if (rank_ == 0 || carry == WeightCarry::Reset) {
    std::fill(h_.begin(), h_.end(), Complex(0.0));
  } else if (carry == WeightCarry::Keep) {
    std::fill(h_.begin() + static_cast<std::ptrdiff_t>(r_new * l_taps), h_.end(), Complex(0.0));
  } else {
    // Function in monomial coordinates: g = T_old^H h. When the rank drops
    // and the moments are known, project onto the new span: h' = T_new G g
    // with G the order-domain moment Gram. Otherwise solve T_new^H h' = g,
    // which preserves the function exactly whenever it lies in the new span.
    const bool project = r_new < r_old && moments != nullptr && moments->hankel_extent() + 1 >= r_new + r_old - 1;
    std::vector<Complex> g(static_cast<std::size_t>(r_max_));
    std::vector<Complex> gg(r_new);
    std::vector<Complex> hn(r_new);
    ComplexVec out(h_.size(), Complex(0.0));
    for (std::size_t l = 0; l < l_taps; ++l) {
      std::fill(g.begin(), g.end(), Complex(0.0));
      for (std::size_t k = 0; k < r_old; ++k)
        for (std::size_t p = k; p < r_old; ++p) g[k] += std::conj(t_(p, k)) * h_[p * l_taps + l];
      if (project) {
        for (std::size_t i = 0; i < r_new; ++i) {
          gg[i] = 0.0;
          for (std::size_t k = 0; k < r_old; ++k) gg[i] += moments->hankel_entry(i + k) * g[k];
        }
        for (std::size_t p = 0; p < r_new; ++p) {
          hn[p] = 0.0;
          for (std::size_t k = 0; k <= p; ++k) hn[p] += t(p, k) * gg[k];
        }
      } else {
        for (std::size_t i = r_new; i-- > 0;) {
          Complex s = g[i];
          for (std::size_t j = i + 1; j < r_new; ++j) s -= std::conj(t(j, i)) * hn[j];
          hn[i] = s / std::conj(t(i, i));
        }
      }
      for (std::size_t p = 0; p < r_new; ++p) out[p * l_taps + l] = hn[p];
    }
    h_ = std::move(out);
  }
  t_ = t;
  rank_ = rank;
  have_basis_ = true;
  ++rebuilds_;
}

bool CancellerEngine::rebuild_aop() {
  std::vector<double> mu(moment_sums_.size());
  const long double n = static_cast<long double>(collected_);
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = static_cast<double>(moment_sums_[k] / n);
  if (!(mu[0] > 0.0)) return false;
  OrthonormalBasis basis;
  try {
    basis = build_basis(MomentVector(MomentKind::EvenOnly, std::move(mu)), cfg_.order);
  } catch (const Error&) {
    return false;
  }
  install(to_complex(change_of_basis(basis), static_cast<std::size_t>(r_max_)), basis.effective_rank,
          cfg_.effective_carry(), &basis.moments);
  return true;
}

bool CancellerEngine::rebuild_whitened() {
  const auto r = static_cast<std::size_t>(r_max_);
  const long double n = static_cast<long double>(collected_);
  ComplexMatrix cov(r);
  double trace = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      std::complex<long double> c = cov_sum_[i * r + j];
      if (collected_ >= 2) {
        const std::complex<long double> mi(mean_sum_[i].real(), mean_sum_[i].imag());
        const std::complex<long double> mj(mean_sum_[j].real(), mean_sum_[j].imag());
        c = (c - mi * std::conj(mj) / n) / (n - 1.0L);
      } else {
        c /= n;
      }
      cov(i, j) = Complex(static_cast<double>(c.real()), static_cast<double>(c.imag()));
    }
    trace += cov(i, i).real();
  }
  if (!(trace > 0.0) || !std::isfinite(trace)) return false;
  double ridge = cfg_.ridge * trace / static_cast<double>(r);
  for (int attempt = 0; attempt <= 3; ++attempt, ridge *= 10.0) {
    ComplexMatrix loaded = cov;
    for (std::size_t i = 0; i < r; ++i) loaded(i, i) += ridge;
    try {
      const auto lower = cholesky_hermitian(loaded);
      install(invert_lower(lower), r_max_, cfg_.effective_carry());
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    }
  }
  return false;
}

void CancellerEngine::track(Complex x, std::size_t n) {
  if (cfg_.n_int > 0) {
    const std::size_t ws = (n / cfg_.n_int) * cfg_.n_int;
    if (ws != window_start_) {
      window_start_ = ws;
      collected_ = 0;
      std::fill(moment_sums_.begin(), moment_sums_.end(), 0.0L);
      std::fill(mean_sum_.begin(), mean_sum_.end(), Complex(0.0));
      std::fill(cov_sum_.begin(), cov_sum_.end(), 0.0L);
    }
  }
  const bool whitened = cfg_.algorithm == Algorithm::HpWhitened;
  const std::size_t limit = whitened && cfg_.n_cov > 0 ? cfg_.n_cov : cfg_.n_max;
  if (collected_ >= limit) return;

  ++collected_;
  if (whitened) {
    const auto r = static_cast<std::size_t>(r_max_);
    if (mean_sum_.size() != r) mean_sum_.assign(r, Complex(0.0));
    evaluate_monomials(BasisFamily::OddOnly, r_max_, x, mono_);
    for (std::size_t i = 0; i < r; ++i) {
      mean_sum_[i] += mono_[i];
      for (std::size_t j = 0; j < r; ++j) {
        const Complex c = mono_[i] * std::conj(mono_[j]);
        cov_sum_[i * r + j] += std::complex<long double>(c.real(), c.imag());
      }
    }
  } else {
    const long double a = std::norm(x);
    long double pw = 1.0L;
    for (auto& s : moment_sums_) {
      pw *= a;
      s += pw;
    }
  }

  // The first window refines its basis on every sample; later windows keep
  // the previous basis until collection completes.
  if (window_start_ == 0 || collected_ == limit) {
    if (whitened) {
      rebuild_whitened();
    } else {
      rebuild_aop();
    }
  }
}

void CancellerEngine::set_mcs(const std::string& id) {
  if (cfg_.algorithm != Algorithm::Lut) return;
  const auto it = lut_->find(id);
  if (it == lut_->end()) throw Error(ErrorCode::UnknownMcs, "MCS '" + id + "' not present in LUT");
  const auto& basis = it->second;
  if (basis.family != BasisFamily::OddOnly) {
    throw Error(ErrorCode::ConfigError, "LUT entry '" + id + "' is not an odd-family basis");
  }
  const int rank = std::min(basis.effective_rank, r_max_);
  RealMatrix c = change_of_basis(basis);
  ComplexMatrix t(static_cast<std::size_t>(r_max_));
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j <= i; ++j) t(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = c(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  install(t, rank, cfg_.effective_carry(), &basis.moments);
}

Complex CancellerEngine::process(std::span<const Complex> x, std::size_t n, Complex y) {
  const auto l_taps = static_cast<std::size_t>(cfg_.taps);
  const auto r_all = static_cast<std::size_t>(r_max_);

  if (cfg_.algorithm == Algorithm::Aop || cfg_.algorithm == Algorithm::HpWhitened) track(x[n], n);
  if (cfg_.algorithm == Algorithm::Hp) {
    evaluate_monomials(BasisFamily::OddOnly, r_max_, x[n], mono_);
    ++hp_count_;
    for (std::size_t p = 0; p < r_all; ++p) {
      hp_power_sum_[p] += std::norm(mono_[p]);
      const double avg = static_cast<double>(hp_power_sum_[p] / static_cast<long double>(hp_count_));
      nominal_[p] = avg > 0.0 ? avg : 1.0;
    }
  }
  if (rank_ == 0) return y;

  const auto r = static_cast<std::size_t>(rank_);
  const auto pre = static_cast<std::ptrdiff_t>(cfg_.precursor);
  double energy = 0.0;
  for (std::size_t l = 0; l < l_taps; ++l) {
    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(n) + pre - static_cast<std::ptrdiff_t>(l);
    if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(x.size())) {
      for (std::size_t p = 0; p < r; ++p) phi_[p * l_taps + l] = 0.0;
      continue;
    }
    evaluate_monomials(BasisFamily::OddOnly, rank_, x[static_cast<std::size_t>(idx)], mono_);
    for (std::size_t p = 0; p < r; ++p) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k <= p; ++k) acc += t_(p, k) * mono_[k];
      phi_[p * l_taps + l] = acc;
      energy += std::norm(acc) / nominal_[p];
    }
  }

  // Clamp the step when the regressor is far above its nominal energy so
  // heavy-tailed inputs cannot throw the weights out of the stable region.
  double g = 1.0;
  if (cfg_.guard > 0.0 && energy > 0.0) {
    g = std::min(1.0, cfg_.guard * static_cast<double>(l_taps * r) / energy);
  }
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t l = 0; l < l_taps; ++l) step_[p * l_taps + l] = cfg_.mu_step * g / nominal_[p];

  const std::size_t used = r * l_taps;
  const Complex e = lms_update(std::span<Complex>(h_.data(), used), std::span<const Complex>(phi_.data(), used), y,
                               [this](std::size_t i) { return step_[i]; });
  check_divergence(std::span<const Complex>(h_.data(), used));
  return e;
}

ComplexVec CancellerEngine::monomial_weights() const {
  const auto l_taps = static_cast<std::size_t>(cfg_.taps);
  const auto r = static_cast<std::size_t>(rank_);
  ComplexVec g(static_cast<std::size_t>(r_max_) * l_taps, Complex(0.0));
  for (std::size_t l = 0; l < l_taps; ++l)
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t p = k; p < r; ++p) g[k * l_taps + l] += std::conj(t_(p, k)) * h_[p * l_taps + l];
  return g;
}

RunTrace run_canceller(const CancellerConfig& cfg, std::span<const Complex> x, std::span<const Complex> y,
                       std::span<const McsMarker> markers, const McsLut* lut) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "run_canceller: x and y lengths differ");
  CancellerEngine engine(cfg, lut);
  if (cfg.algorithm == Algorithm::Lut) {
    for (const auto& m : markers)
      if (lut->find(m.mcs_id) == lut->end()) {
        throw Error(ErrorCode::UnknownMcs, "MCS '" + m.mcs_id + "' not present in LUT");
      }
  }
  RunTrace out;
  out.error.resize(x.size());
  std::size_t next_marker = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    while (next_marker < markers.size() && markers[next_marker].start <= n) {
      engine.set_mcs(markers[next_marker].mcs_id);
      ++next_marker;
    }
    try {
      out.error[n] = engine.process(x, n, y[n]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Diverged) throw;
      out.diverged = true;
      out.diverged_at = n;
      for (std::size_t k = n; k < x.size(); ++k) out.error[k] = y[k];
      break;
    }
  }
  out.final_rank = engine.rank();
  out.rebuilds = engine.rebuild_count();
  out.monomial_weights = engine.monomial_weights();
  return out;
}

RunTrace run_aop(std::span<const Complex> x, std::span<const Complex> y, CancellerConfig cfg) {
  cfg.algorithm = Algorithm::Aop;
  return run_canceller(cfg, x, y);
}

RunTrace run_fixed(std::span<const Complex> x, std::span<const Complex> y, Algorithm kind, CancellerConfig cfg) {
  if (kind != Algorithm::Hp && kind != Algorithm::Ih) {
    throw Error(ErrorCode::InvalidArgument, "run_fixed: basis kind must be hp or ih");
  }
  cfg.algorithm = kind;
  return run_canceller(cfg, x, y);
}

RunTrace run_whitened(std::span<const Complex> x, std::span<const Complex> y, CancellerConfig cfg) {
  cfg.algorithm = Algorithm::HpWhitened;
  return run_canceller(cfg, x, y);
}

RunTrace run_lut(std::span<const Complex> x, std::span<const Complex> y, const McsLut& lut,
                 std::span<const McsMarker> markers, CancellerConfig cfg) {
  cfg.algorithm = Algorithm::Lut;
  return run_canceller(cfg, x, y, markers, &lut);
}

std::vector<double> mse_trace_power(std::span<const double> power, std::size_t window) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "mse_trace: window must be >= 1");
  std::vector<double> out(power.size());
  long double sum = 0.0L;
  for (std::size_t n = 0; n < power.size(); ++n) {
    sum += power[n];
    if (n >= window) sum -= power[n - window];
    const std::size_t count = std::min(n + 1, window);
    const double v = static_cast<double>(sum / static_cast<long double>(count));
    out[n] = 10.0 * std::log10(std::max(v, 1e-300));
  }
  return out;
}

std::vector<double> mse_trace(std::span<const Complex> e, std::size_t window, double reference_power) {
  if (!(reference_power > 0.0)) throw Error(ErrorCode::ZeroSiPower, "mse_trace: reference power must be > 0");
  std::vector<double> p(e.size());
  for (std::size_t n = 0; n < e.size(); ++n) p[n] = std::norm(e[n]) / reference_power;
  return mse_trace_power(p, window);
}

}  // namespace aopsic
