#include "aopsic/aopsic.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "aopsic/basis_io.hpp"
#include "aopsic/error.hpp"
#include "aopsic/harness.hpp"
#include "aopsic/moments.hpp"
#include "aopsic/orthopoly.hpp"
#include "aopsic/scenario.hpp"

struct aopsic_basis {
  aopsic::OrthonormalBasis basis;
};

struct aopsic_scenario {
  aopsic::ScenarioConfig config;
};

struct aopsic_result {
  aopsic::ScenarioResult result;
};

namespace {

thread_local std::string g_last_error;

struct BufferTooSmall : std::exception {
  const char* what() const noexcept override { return "output buffer too small"; }
};

aopsic_status map_code(aopsic::ErrorCode c) {
  using aopsic::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return AOPSIC_ERR_INVALID_ARGUMENT;
    case ErrorCode::SingularMatrix: return AOPSIC_ERR_SINGULAR_MATRIX;
    case ErrorCode::NotPositiveDefinite: return AOPSIC_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::BadLength: return AOPSIC_ERR_BAD_LENGTH;
    case ErrorCode::EmptyInput: return AOPSIC_ERR_EMPTY_INPUT;
    case ErrorCode::EmptyConstellation: return AOPSIC_ERR_EMPTY_CONSTELLATION;
    case ErrorCode::InsufficientMoments: return AOPSIC_ERR_INSUFFICIENT_MOMENTS;
    case ErrorCode::RankDeficient: return AOPSIC_ERR_RANK_DEFICIENT;
    case ErrorCode::NonPositiveNorm: return AOPSIC_ERR_NON_POSITIVE_NORM;
    case ErrorCode::ZeroSiPower: return AOPSIC_ERR_ZERO_SI_POWER;
    case ErrorCode::Diverged: return AOPSIC_ERR_DIVERGED;
    case ErrorCode::UnknownMcs: return AOPSIC_ERR_UNKNOWN_MCS;
    case ErrorCode::ConfigError: return AOPSIC_ERR_CONFIG;
    case ErrorCode::IoError: return AOPSIC_ERR_IO;
  }
  return AOPSIC_ERR_INTERNAL;
}

template <typename Fn>
aopsic_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return AOPSIC_OK;
  } catch (const aopsic::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const BufferTooSmall& e) {
    g_last_error = e.what();
    return AOPSIC_ERR_BUFFER_TOO_SMALL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AOPSIC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AOPSIC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw aopsic::Error(aopsic::ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void copy_out(const aopsic::MomentVector& mu, double* out) {
  const auto v = mu.values();
  std::copy(v.begin(), v.end(), out);
}

aopsic::MomentKind kind_of(int all_orders) {
  return all_orders ? aopsic::MomentKind::AllOrders : aopsic::MomentKind::EvenOnly;
}

}  // namespace

extern "C" {

const char* aopsic_version(void) { return aopsic::kVersion; }

const char* aopsic_status_string(aopsic_status status) {
  switch (status) {
    case AOPSIC_OK: return "ok";
    case AOPSIC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AOPSIC_ERR_SINGULAR_MATRIX: return "singular matrix";
    case AOPSIC_ERR_NOT_POSITIVE_DEFINITE: return "matrix not positive definite";
    case AOPSIC_ERR_BAD_LENGTH: return "bad length";
    case AOPSIC_ERR_EMPTY_INPUT: return "empty input";
    case AOPSIC_ERR_EMPTY_CONSTELLATION: return "empty constellation";
    case AOPSIC_ERR_INSUFFICIENT_MOMENTS: return "insufficient moments";
    case AOPSIC_ERR_RANK_DEFICIENT: return "rank deficient";
    case AOPSIC_ERR_NON_POSITIVE_NORM: return "non-positive norm";
    case AOPSIC_ERR_ZERO_SI_POWER: return "zero SI power";
    case AOPSIC_ERR_DIVERGED: return "diverged";
    case AOPSIC_ERR_UNKNOWN_MCS: return "unknown MCS";
    case AOPSIC_ERR_CONFIG: return "configuration error";
    case AOPSIC_ERR_IO: return "I/O error";
    case AOPSIC_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case AOPSIC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* aopsic_last_error(void) { return g_last_error.c_str(); }

void aopsic_string_free(char* s) { delete[] s; }

aopsic_status aopsic_moments_gaussian(double variance, size_t k, double* out) {
  return guarded([&] {
    require(out != nullptr || k == 0, "out is null");
    copy_out(aopsic::gaussian_moments(variance, k), out);
  });
}

aopsic_status aopsic_moments_uniform(double half_width, size_t k, double* out) {
  return guarded([&] {
    require(out != nullptr || k == 0, "out is null");
    copy_out(aopsic::uniform_moments(half_width, k), out);
  });
}

aopsic_status aopsic_moments_exponential(double rate, size_t k, int all_orders, double* out) {
  return guarded([&] {
    require(out != nullptr || k == 0, "out is null");
    copy_out(aopsic::exponential_moments(rate, k, kind_of(all_orders)), out);
  });
}

aopsic_status aopsic_moments_qam(int order, size_t k, double* out) {
  return guarded([&] {
    require(out != nullptr || k == 0, "out is null");
    copy_out(aopsic::qam_moments(aopsic::qam_constellation(order), k), out);
  });
}

aopsic_status aopsic_moments_estimate(const double* iq, size_t n, size_t k, int all_orders, double* out) {
  return guarded([&] {
    require(iq != nullptr || n == 0, "iq is null");
    require(out != nullptr, "out is null");
    aopsic::ComplexVec x(n);
    for (size_t i = 0; i < n; ++i) x[i] = {iq[2 * i], iq[2 * i + 1]};
    copy_out(aopsic::estimate_moments(x, k, kind_of(all_orders)), out);
  });
}

aopsic_status aopsic_basis_build(const double* moments, size_t count, int all_orders, int max_order,
                                 aopsic_basis** out) {
  return guarded([&] {
    require(moments != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    aopsic::MomentVector mu(kind_of(all_orders), std::vector<double>(moments, moments + count));
    auto b = all_orders ? aopsic::build_extended_basis(mu, max_order) : aopsic::build_basis(mu, max_order);
    *out = new aopsic_basis{std::move(b)};
  });
}

aopsic_status aopsic_basis_from_json(const char* json, aopsic_basis** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new aopsic_basis{aopsic::basis_from_json(json)};
  });
}

void aopsic_basis_free(aopsic_basis* basis) { delete basis; }

int aopsic_basis_rank(const aopsic_basis* basis) { return basis ? basis->basis.effective_rank : 0; }

aopsic_status aopsic_basis_coeffs(const aopsic_basis* basis, int index, double* out, size_t capacity,
                                  size_t* length) {
  return guarded([&] {
    require(basis != nullptr, "basis is null");
    require(index >= 0 && index < basis->basis.effective_rank, "index out of range");
    const auto& c = basis->basis.coeffs[static_cast<size_t>(index)];
    if (length) *length = c.size();
    if (capacity < c.size() || out == nullptr) throw BufferTooSmall();
    std::copy(c.begin(), c.end(), out);
  });
}

aopsic_status aopsic_basis_norm_sq(const aopsic_basis* basis, int index, double* out) {
  return guarded([&] {
    require(basis != nullptr && out != nullptr, "null argument");
    require(index >= 0 && index < basis->basis.effective_rank, "index out of range");
    *out = basis->basis.norm_sq[static_cast<size_t>(index)];
  });
}

aopsic_status aopsic_basis_evaluate(const aopsic_basis* basis, double re, double im, double* out_iq) {
  return guarded([&] {
    require(basis != nullptr && out_iq != nullptr, "null argument");
    const auto v = aopsic::evaluate_regressor(basis->basis, {re, im});
    for (size_t i = 0; i < v.size(); ++i) {
      out_iq[2 * i] = v[i].real();
      out_iq[2 * i + 1] = v[i].imag();
    }
  });
}

aopsic_status aopsic_basis_to_json(const aopsic_basis* basis, char** out) {
  return guarded([&] {
    require(basis != nullptr && out != nullptr, "null argument");
    *out = dup(aopsic::basis_to_json(basis->basis) + "\n");
  });
}

aopsic_status aopsic_lut_standard_json(int max_order, char** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = dup(aopsic::lut_to_json(aopsic::standard_qam_lut(max_order)) + "\n");
  });
}

aopsic_status aopsic_table(int max_order, char** json_out, char** text_out) {
  return guarded([&] {
    const auto rows = aopsic::qam_table(max_order);
    if (json_out) *json_out = dup(aopsic::qam_table_json(rows));
    if (text_out) *text_out = dup(aopsic::qam_table_text(rows));
  });
}

aopsic_status aopsic_scenario_load(const char* path, aopsic_scenario** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new aopsic_scenario{aopsic::load_scenario(path)};
  });
}

aopsic_status aopsic_scenario_parse(const char* json, aopsic_scenario** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new aopsic_scenario{aopsic::parse_scenario(json)};
  });
}

aopsic_status aopsic_scenario_set_seed(aopsic_scenario* scenario, uint64_t seed) {
  return guarded([&] {
    require(scenario != nullptr, "scenario is null");
    scenario->config.seeds = {seed};
  });
}

void aopsic_scenario_free(aopsic_scenario* scenario) { delete scenario; }

aopsic_status aopsic_scenario_run(const aopsic_scenario* scenario, unsigned threads, aopsic_result** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new aopsic_result{aopsic::run_scenario(scenario->config, threads)};
  });
}

void aopsic_result_free(aopsic_result* result) { delete result; }

size_t aopsic_result_canceller_count(const aopsic_result* result) {
  return result ? result->result.cancellers.size() : 0;
}

size_t aopsic_result_length(const aopsic_result* result) { return result ? result->result.length : 0; }

size_t aopsic_result_seed_count(const aopsic_result* result) {
  return result ? result->result.config.seeds.size() : 0;
}

const char* aopsic_result_canceller_name(const aopsic_result* result, size_t index) {
  if (!result || index >= result->result.cancellers.size()) return nullptr;
  return result->result.cancellers[index].name.c_str();
}

size_t aopsic_result_diverged_seeds(const aopsic_result* result, size_t index) {
  if (!result || index >= result->result.cancellers.size()) return 0;
  const auto& d = result->result.cancellers[index].diverged;
  return static_cast<size_t>(std::count(d.begin(), d.end(), true));
}

aopsic_status aopsic_result_mean_mse_db(const aopsic_result* result, size_t index, size_t from, size_t to,
                                        double* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    require(index < result->result.cancellers.size(), "index out of range");
    *out = aopsic::mean_db(result->result.cancellers[index].mean_power, from, to);
  });
}

aopsic_status aopsic_result_write(const aopsic_result* result, const char* dir) {
  return guarded([&] {
    require(result != nullptr && dir != nullptr, "null argument");
    aopsic::write_outputs(result->result, dir);
  });
}

aopsic_status aopsic_psd_file(const char* residual_csv, const char* out_csv, size_t segment, double overlap) {
  return guarded([&] {
    require(residual_csv != nullptr && out_csv != nullptr, "null argument");
    const auto text = aopsic::read_text_file(residual_csv);
    aopsic::write_text_file(out_csv, aopsic::psd_csv_from_residual_csv(text, segment, overlap));
  });
}

}  // extern "C"
