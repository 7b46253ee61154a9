#pragma once

#include <string>
#include <vector>

#include "aopsic/basis_io.hpp"
#include "aopsic/scenario.hpp"

namespace aopsic {

inline constexpr const char* kVersion = "1.0.0";

struct CancellerResult {
  std::string name;
  Algorithm algorithm = Algorithm::Aop;
  std::vector<std::vector<double>> power;  // per seed |e[n]|^2 / P_SI
  std::vector<bool> diverged;
  std::vector<int> final_rank;
  std::vector<double> mean_power;          // arithmetic mean over seeds

  bool all_diverged() const;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::size_t length = 0;
  double noise_floor_db = 0.0;
  std::vector<std::size_t> boundaries;
  std::vector<double> si_power;              // per seed
  std::vector<CancellerResult> cancellers;
  ComplexVec first_seed_rx;                  // y for seeds[0]
  std::vector<ComplexVec> first_seed_residual;  // per canceller, seeds[0]
};

/// Generated stream and received signal for one seed.
struct SeedData {
  ScheduleStream stream;
  ComplexVec rx;
  double si_power = 0.0;
  double noise_variance = 0.0;
};

SeedData prepare_seed(const ScenarioConfig& cfg, std::uint64_t seed);

/// LUT keyed by every mcs_id in the schedule, built from each segment's
/// closed-form or (for OFDM and mixtures) sampled moments.
McsLut builtin_lut(const SegmentSchedule& schedule, int max_order);

/// LUT for "4qam", "16qam", "64qam", "256qam" from constellation moments.
McsLut standard_qam_lut(int max_order);

/// Runs every (canceller, seed) pair. threads == 0 uses hardware concurrency.
ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads = 0);

/// mse.csv body. Rows start at sample W.
std::string format_mse_csv(const ScenarioResult& result);
std::string format_residual_csv(const ScenarioResult& result);
std::string format_summary_json(const ScenarioResult& result);

void emit_csv(const ScenarioResult& result, const std::string& path);

/// Writes mse.csv, residual.csv and summary.json into dir (created if needed).
void write_outputs(const ScenarioResult& result, const std::string& dir);

/// Mean of v[from, to) in linear scale, returned in dB.
double mean_db(const std::vector<double>& power, std::size_t from, std::size_t to);

/// First index >= from at which the W-sample sliding MSE drops to threshold_db,
/// or npos-like length() when it never does before `to`.
std::size_t first_crossing(const std::vector<double>& power, std::size_t window, double threshold_db,
                           std::size_t from, std::size_t to);

struct PsdPoint {
  double frequency = 0.0;  // cycles per sample, [-0.5, 0.5)
  double power_db = 0.0;
};

/// Hann-windowed averaged periodogram. Mean over bins equals signal power.
std::vector<PsdPoint> welch_psd(std::span<const Complex> x, std::size_t segment, double overlap);

/// Reads residual.csv style columns (<name>_re, <name>_im) and writes
/// frequency,<name>_psd_db,... for each pair.
std::string psd_csv_from_residual_csv(const std::string& csv_text, std::size_t segment, double overlap);

struct QamTableRow {
  int order = 0;
  std::vector<double> moments;  // mu_2, mu_4, ...
  OrthonormalBasis basis;
};

std::vector<QamTableRow> qam_table(int max_order);
std::string qam_table_json(const std::vector<QamTableRow>& rows);
std::string qam_table_text(const std::vector<QamTableRow>& rows);

}  // namespace aopsic
