#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aopsic/canceller.hpp"
#include "aopsic/signals.hpp"

namespace aopsic {

inline constexpr int kScenarioSchemaVersion = 1;

struct ChannelSpec {
  double gamma = 3.0;
  double beta = 0.09;
  std::size_t pa_memory = 9;           // random taps drawn per seed when pa_taps is unset
  std::optional<ComplexVec> pa_taps;
  std::size_t si_memory = 1;           // random taps when si_taps is unset and si_memory > 1
  std::optional<ComplexVec> si_taps;
};

struct CancellerSpec {
  CancellerConfig config;
  std::string lut;  // "" (none), "builtin" or a LUT file path
};

struct ScenarioConfig {
  std::string name;
  SegmentSchedule schedule;
  ChannelSpec channel;
  std::vector<CancellerSpec> cancellers;
  double si_to_noise_db = 50.0;
  std::vector<std::uint64_t> seeds{0};
  std::size_t mse_window = 100;
  std::size_t steady_state = 2000;

  void validate() const;
};

/// Parses a scenario document. Errors are ConfigError naming the field path.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace aopsic
