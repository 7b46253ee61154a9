#include "aopsic/scenario.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "aopsic/basis_io.hpp"
#include "aopsic/error.hpp"

namespace aopsic {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required field missing");
  return *it;
}

template <typename T>
T as(const json& v, const std::string& path) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(path, "wrong type");
  }
}

template <typename T>
T opt(const json& obj, const std::string& key, const std::string& path, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return as<T>(*it, path + "." + key);
}

double positive(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const double v = opt<double>(obj, key, path, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) fail(path + "." + key, "must be a finite number > 0");
  return v;
}

std::size_t count(const json& obj, const std::string& key, const std::string& path, std::size_t fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) fail(path + "." + key, "must be a non-negative integer");
  return it->get<std::size_t>();
}

ComplexVec taps(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of [re, im] pairs");
  ComplexVec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& t = v[i];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (t.is_number()) {
      out.emplace_back(t.get<double>(), 0.0);
    } else if (t.is_array() && t.size() == 2 && t[0].is_number() && t[1].is_number()) {
      out.emplace_back(t[0].get<double>(), t[1].get<double>());
    } else {
      fail(p, "expected a number or [re, im]");
    }
  }
  return out;
}

DistributionSpec distribution(const json& v, const std::string& path) {
  const auto kind = as<std::string>(need(v, "kind", path), path + ".kind");
  DistributionSpec d;
  if (kind == "complex_gaussian") {
    d = DistributionSpec::complex_gaussian(positive(v, "variance", path, 1.0));
  } else if (kind == "uniform") {
    d = DistributionSpec::uniform_real(positive(v, "half_width", path, 1.0));
  } else if (kind == "exponential") {
    d = DistributionSpec::exponential(positive(v, "rate", path, 1.0));
  } else if (kind == "qam") {
    d = DistributionSpec::qam(as<int>(need(v, "order", path), path + ".order"));
  } else if (kind == "mixture") {
    const auto& comps = need(v, "components", path);
    if (!comps.is_array() || comps.empty()) fail(path + ".components", "expected a non-empty array");
    std::vector<DistributionSpec> parts;
    for (std::size_t i = 0; i < comps.size(); ++i)
      parts.push_back(distribution(comps[i], path + ".components[" + std::to_string(i) + "]"));
    d = DistributionSpec::mixture(std::move(parts));
  } else {
    fail(path + ".kind", "unknown distribution '" + kind + "'");
  }
  d.unit_power = opt<bool>(v, "unit_power", path, false);
  try {
    d.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return d;
}

Waveform waveform(const json& v, const std::string& path) {
  Waveform w;
  const auto kind = as<std::string>(need(v, "kind", path), path + ".kind");
  if (kind == "direct") {
    w.kind = Waveform::Kind::Direct;
  } else if (kind == "scfde") {
    w.kind = Waveform::Kind::Scfde;
  } else if (kind == "ofdm") {
    w.kind = Waveform::Kind::Ofdm;
    w.n_subcarriers = static_cast<int>(count(v, "subcarriers", path, 64));
  } else {
    fail(path + ".kind", "unknown waveform '" + kind + "'");
  }
  try {
    w.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return w;
}

CancellerSpec canceller(const json& v, const std::string& path) {
  CancellerSpec s;
  auto& c = s.config;
  try {
    c.algorithm = algorithm_from_string(as<std::string>(need(v, "algorithm", path), path + ".algorithm"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    fail(path + ".algorithm", e.what());
  }
  c.name = opt<std::string>(v, "name", path, "");
  c.order = opt<int>(v, "P", path, c.order);
  c.taps = opt<int>(v, "L", path, c.taps);
  c.precursor = opt<int>(v, "precursor_taps", path, c.precursor);
  c.mu_step = opt<double>(v, "mu_step", path, c.mu_step);
  c.guard = opt<double>(v, "step_guard", path, c.guard);
  c.n_max = count(v, "N_max_samples", path, c.n_max);
  c.n_int = count(v, "N_int_samples", path, c.n_int);
  c.n_cov = count(v, "N_cov_samples", path, c.n_cov);
  c.ridge = opt<double>(v, "ridge_relative", path, c.ridge);
  c.ih_variance = opt<double>(v, "ih_variance", path, c.ih_variance);
  if (v.contains("weight_carry")) {
    try {
      c.carry = weight_carry_from_string(as<std::string>(v["weight_carry"], path + ".weight_carry"));
    } catch (const Error& e) {
      fail(path + ".weight_carry", e.what());
    }
  }
  s.lut = opt<std::string>(v, "lut", path, c.algorithm == Algorithm::Lut ? "builtin" : "");
  try {
    c.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return s;
}

json taps_json(const ComplexVec& t) {
  json a = json::array();
  for (const auto& v : t) a.push_back({v.real(), v.imag()});
  return a;
}

json distribution_json(const DistributionSpec& d) {
  json j;
  switch (d.kind) {
    case DistributionSpec::Kind::ComplexGaussian: j = {{"kind", "complex_gaussian"}, {"variance", d.param}}; break;
    case DistributionSpec::Kind::UniformReal: j = {{"kind", "uniform"}, {"half_width", d.param}}; break;
    case DistributionSpec::Kind::Exponential: j = {{"kind", "exponential"}, {"rate", d.param}}; break;
    case DistributionSpec::Kind::Qam: j = {{"kind", "qam"}, {"order", d.qam_order}}; break;
    case DistributionSpec::Kind::Mixture: {
      j = {{"kind", "mixture"}, {"components", json::array()}};
      for (const auto& c : d.components) j["components"].push_back(distribution_json(c));
      break;
    }
  }
  if (d.unit_power) j["unit_power"] = true;
  return j;
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    schedule.validate();
  } catch (const Error& e) {
    fail("schedule", e.what());
  }
  if (cancellers.empty()) fail("cancellers", "at least one canceller is required");
  if (seeds.empty()) fail("seeds", "at least one seed is required");
  if (mse_window < 1) fail("mse_window_samples", "must be >= 1");
  if (mse_window >= schedule.length()) fail("mse_window_samples", "must be shorter than the schedule");
  if (!std::isfinite(si_to_noise_db)) fail("si_to_noise_db", "must be finite");
  if (!(channel.gamma > 0.0)) fail("channel.pa_gamma", "must be > 0");
  if (!(channel.beta >= 0.0)) fail("channel.pa_beta", "must be >= 0");
  if (!channel.pa_taps && channel.pa_memory < 1) fail("channel.pa_memory_taps", "must be >= 1");
  if (!channel.si_taps && channel.si_memory < 1) fail("channel.si_memory_taps", "must be >= 1");
  std::set<std::string> names;
  for (std::size_t i = 0; i < cancellers.size(); ++i) {
    const auto& c = cancellers[i];
    const std::string path = "cancellers[" + std::to_string(i) + "]";
    try {
      c.config.validate();
    } catch (const Error& e) {
      fail(path, e.what());
    }
    if (!names.insert(c.config.display_name()).second) {
      fail(path + ".name", "duplicate canceller name '" + c.config.display_name() + "'");
    }
    if (c.config.algorithm == Algorithm::Lut) {
      if (c.lut.empty()) fail(path + ".lut", "LUT canceller needs a LUT");
      for (std::size_t k = 0; k < schedule.segments.size(); ++k)
        if (schedule.segments[k].mcs_id.empty()) {
          fail("schedule.segments[" + std::to_string(k) + "].mcs_id", "required by LUT canceller " + path);
        }
    }
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("scenario", "expected an object");
  const int version = opt<int>(doc, "schema_version", "scenario", kScenarioSchemaVersion);
  if (version != kScenarioSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(version));
  }

  ScenarioConfig cfg;
  cfg.name = opt<std::string>(doc, "name", "scenario", "");
  cfg.si_to_noise_db = opt<double>(doc, "si_to_noise_db", "scenario", cfg.si_to_noise_db);
  cfg.mse_window = count(doc, "mse_window_samples", "scenario", cfg.mse_window);
  cfg.steady_state = count(doc, "steady_state_samples", "scenario", cfg.steady_state);

  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (!s.is_array()) fail("seeds", "expected an array of non-negative integers");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_unsigned()) fail("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      cfg.seeds.push_back(s[i].get<std::uint64_t>());
    }
  }

  const auto& sched = need(doc, "schedule", "scenario");
  const auto& segs = need(sched, "segments", "schedule");
  if (!segs.is_array()) fail("schedule.segments", "expected an array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = "schedule.segments[" + std::to_string(i) + "]";
    const auto& sj = segs[i];
    Segment seg;
    seg.dist = distribution(need(sj, "distribution", p), p + ".distribution");
    if (sj.contains("waveform")) seg.waveform = waveform(sj["waveform"], p + ".waveform");
    seg.duration = count(sj, "duration_samples", p, 0);
    if (seg.duration < 1) fail(p + ".duration_samples", "must be >= 1");
    seg.mcs_id = opt<std::string>(sj, "mcs_id", p, "");
    seg.redraw_channel = opt<bool>(sj, "redraw_channel", p, false);
    cfg.schedule.segments.push_back(std::move(seg));
  }
  if (sched.contains("channel_redraw_samples")) {
    const auto& r = sched["channel_redraw_samples"];
    if (!r.is_array()) fail("schedule.channel_redraw_samples", "expected an array");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!r[i].is_number_unsigned()) {
        fail("schedule.channel_redraw_samples[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      cfg.schedule.channel_redraws.push_back(r[i].get<std::size_t>());
    }
  }

  if (doc.contains("channel")) {
    const auto& c = doc["channel"];
    if (!c.is_object()) fail("channel", "expected an object");
    cfg.channel.gamma = opt<double>(c, "pa_gamma", "channel", cfg.channel.gamma);
    cfg.channel.beta = opt<double>(c, "pa_beta", "channel", cfg.channel.beta);
    cfg.channel.pa_memory = count(c, "pa_memory_taps", "channel", cfg.channel.pa_memory);
    cfg.channel.si_memory = count(c, "si_memory_taps", "channel", cfg.channel.si_memory);
    if (c.contains("pa_taps")) cfg.channel.pa_taps = taps(c["pa_taps"], "channel.pa_taps");
    if (c.contains("si_taps")) cfg.channel.si_taps = taps(c["si_taps"], "channel.si_taps");
  }

  const auto& cs = need(doc, "cancellers", "scenario");
  if (!cs.is_array()) fail("cancellers", "expected an array");
  for (std::size_t i = 0; i < cs.size(); ++i)
    cfg.cancellers.push_back(canceller(cs[i], "cancellers[" + std::to_string(i) + "]"));

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_scenario(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["name"] = cfg.name;
  doc["si_to_noise_db"] = cfg.si_to_noise_db;
  doc["seeds"] = cfg.seeds;
  doc["mse_window_samples"] = cfg.mse_window;
  doc["steady_state_samples"] = cfg.steady_state;
  json segs = json::array();
  for (const auto& s : cfg.schedule.segments) {
    json w;
    switch (s.waveform.kind) {
      case Waveform::Kind::Direct: w = {{"kind", "direct"}}; break;
      case Waveform::Kind::Scfde: w = {{"kind", "scfde"}}; break;
      case Waveform::Kind::Ofdm: w = {{"kind", "ofdm"}, {"subcarriers", s.waveform.n_subcarriers}}; break;
    }
    json sj = {{"distribution", distribution_json(s.dist)}, {"waveform", w}, {"duration_samples", s.duration}};
    if (!s.mcs_id.empty()) sj["mcs_id"] = s.mcs_id;
    if (s.redraw_channel) sj["redraw_channel"] = true;
    segs.push_back(sj);
  }
  doc["schedule"] = {{"segments", segs}};
  if (!cfg.schedule.channel_redraws.empty()) doc["schedule"]["channel_redraw_samples"] = cfg.schedule.channel_redraws;
  json ch = {{"pa_gamma", cfg.channel.gamma},
             {"pa_beta", cfg.channel.beta},
             {"pa_memory_taps", cfg.channel.pa_memory},
             {"si_memory_taps", cfg.channel.si_memory}};
  if (cfg.channel.pa_taps) ch["pa_taps"] = taps_json(*cfg.channel.pa_taps);
  if (cfg.channel.si_taps) ch["si_taps"] = taps_json(*cfg.channel.si_taps);
  doc["channel"] = ch;
  json cs = json::array();
  for (const auto& s : cfg.cancellers) {
    const auto& c = s.config;
    json cj = {{"algorithm", to_string(c.algorithm)},
               {"name", c.display_name()},
               {"P", c.order},
               {"L", c.taps},
               {"precursor_taps", c.precursor},
               {"mu_step", c.mu_step},
               {"step_guard", c.guard},
               {"N_max_samples", c.n_max},
               {"N_int_samples", c.n_int},
               {"N_cov_samples", c.n_cov},
               {"ridge_relative", c.ridge},
               {"ih_variance", c.ih_variance},
               {"weight_carry", to_string(c.effective_carry())}};
    if (!s.lut.empty()) cj["lut"] = s.lut;
    cs.push_back(cj);
  }
  doc["cancellers"] = cs;
  return doc.dump(2);
}

}  // namespace aopsic
