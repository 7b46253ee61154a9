#include "aopsic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aopsic/channel.hpp"
#include "aopsic/error.hpp"
#include "aopsic/moments.hpp"

namespace aopsic {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

constexpr std::size_t kLutSampleCount = std::size_t{1} << 18;

MomentVector segment_moments(const Segment& seg, int max_order) {
  const auto k = static_cast<std::size_t>(max_order);
  const auto& d = seg.dist;
  const bool closed_form = seg.waveform.kind != Waveform::Kind::Ofdm && d.kind != DistributionSpec::Kind::Mixture;
  if (closed_form) {
    MomentVector mu;
    switch (d.kind) {
      case DistributionSpec::Kind::Qam: mu = qam_moments(qam_constellation(d.qam_order), k); break;
      case DistributionSpec::Kind::ComplexGaussian: mu = gaussian_moments(d.param, k); break;
      case DistributionSpec::Kind::UniformReal: mu = uniform_moments(d.param, k); break;
      case DistributionSpec::Kind::Exponential: mu = exponential_moments(d.param, k, MomentKind::EvenOnly); break;
      default: break;
    }
    if (d.unit_power) {
      DistributionSpec raw = d;
      raw.unit_power = false;
      mu = scale_moments(mu, 1.0 / std::sqrt(raw.power()));
    }
    return mu;
  }
  Rng rng({0x5eedULL, 0});
  auto samples = generate(d, kLutSampleCount, rng);
  if (seg.waveform.kind == Waveform::Kind::Ofdm) {
    samples = frame_ofdm(samples, static_cast<std::size_t>(seg.waveform.n_subcarriers));
  }
  return estimate_moments(samples, k, MomentKind::EvenOnly);
}

}  // namespace

bool CancellerResult::all_diverged() const {
  return !diverged.empty() && std::all_of(diverged.begin(), diverged.end(), [](bool d) { return d; });
}

SeedData prepare_seed(const ScenarioConfig& cfg, std::uint64_t seed) {
  SeedData out;
  Rng signal_rng({seed, 0});
  out.stream = build_schedule_stream(cfg.schedule, signal_rng);

  Rng tap_rng({seed, 1});
  NonlinearSystem base;
  base.pa.gamma = cfg.channel.gamma;
  base.pa.beta = cfg.channel.beta;
  base.pa.taps = cfg.channel.pa_taps ? *cfg.channel.pa_taps : random_taps(tap_rng, cfg.channel.pa_memory);
  if (cfg.channel.si_taps) {
    base.si.taps = *cfg.channel.si_taps;
  } else if (cfg.channel.si_memory > 1) {
    base.si.taps = random_taps(tap_rng, cfg.channel.si_memory);
  }
  base.validate();

  std::vector<NonlinearSystem> systems{base};
  const auto& redraws = out.stream.channel_redraws;
  for (std::size_t k = 0; k < redraws.size(); ++k) {
    Rng r({seed, static_cast<std::uint32_t>(3 + k)});
    NonlinearSystem next = base;
    next.pa.taps = random_taps(r, base.pa.taps.size());
    if (!cfg.channel.si_taps && cfg.channel.si_memory > 1) next.si.taps = random_taps(r, cfg.channel.si_memory);
    systems.push_back(std::move(next));
  }

  auto s = si_signal_piecewise(out.stream.samples, systems, redraws);
  double p = 0.0;
  for (const auto& v : s) p += std::norm(v);
  p /= static_cast<double>(s.size());
  if (!(p > 0.0)) throw Error(ErrorCode::ZeroSiPower, "received SI power is zero");
  out.si_power = p;
  out.noise_variance = p * std::pow(10.0, -cfg.si_to_noise_db / 10.0);
  Rng noise_rng({seed, 2});
  if (out.noise_variance > 0.0)
    for (auto& v : s) v += noise_rng.complex_normal(out.noise_variance);
  out.rx = std::move(s);
  return out;
}

McsLut builtin_lut(const SegmentSchedule& schedule, int max_order) {
  McsLut lut;
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const auto& seg = schedule.segments[i];
    if (seg.mcs_id.empty()) continue;
    auto basis = build_basis(segment_moments(seg, max_order), max_order);
    const auto it = lut.find(seg.mcs_id);
    if (it == lut.end()) {
      lut.emplace(seg.mcs_id, std::move(basis));
      continue;
    }
    const auto a = it->second.moments.values();
    const auto b = basis.moments.values();
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k] - b[k]) > 1e-9 * std::max(1.0, std::abs(a[k]))) {
        throw Error(ErrorCode::ConfigError, "schedule.segments[" + std::to_string(i) + "].mcs_id: '" + seg.mcs_id +
                                                "' is used for segments with different statistics");
      }
    }
  }
  return lut;
}

McsLut standard_qam_lut(int max_order) {
  McsLut lut;
  for (int order : {4, 16, 64, 256}) {
    lut.emplace(std::to_string(order) + "qam",
                build_basis(qam_moments(qam_constellation(order), static_cast<std::size_t>(max_order)), max_order));
  }
  return lut;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  ScenarioResult res;
  res.config = cfg;
  res.length = cfg.schedule.length();
  res.noise_floor_db = -cfg.si_to_noise_db;

  const std::size_t nc = cfg.cancellers.size();
  const std::size_t ns = cfg.seeds.size();
  std::vector<McsLut> luts(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& spec = cfg.cancellers[c];
    if (spec.config.algorithm != Algorithm::Lut) continue;
    if (spec.lut == "builtin") {
      luts[c] = builtin_lut(cfg.schedule, spec.config.order);
    } else {
      luts[c] = lut_from_json(read_text_file(spec.lut));
    }
    for (std::size_t k = 0; k < cfg.schedule.segments.size(); ++k) {
      const auto& id = cfg.schedule.segments[k].mcs_id;
      if (luts[c].find(id) == luts[c].end()) {
        throw Error(ErrorCode::ConfigError, "cancellers[" + std::to_string(c) + "].lut: MCS '" + id + "' missing");
      }
    }
  }

  std::vector<SeedData> seeds(ns);
  parallel_for(ns, threads, [&](std::size_t s) { seeds[s] = prepare_seed(cfg, cfg.seeds[s]); });
  res.boundaries = seeds[0].stream.boundaries;
  for (const auto& sd : seeds) res.si_power.push_back(sd.si_power);
  res.first_seed_rx = seeds[0].rx;

  res.cancellers.resize(nc);
  res.first_seed_residual.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    auto& cr = res.cancellers[c];
    cr.name = cfg.cancellers[c].config.display_name();
    cr.algorithm = cfg.cancellers[c].config.algorithm;
    cr.power.resize(ns);
    cr.diverged.assign(ns, false);
    cr.final_rank.assign(ns, 0);
  }

  parallel_for(nc * ns, threads, [&](std::size_t task) {
    const std::size_t c = task / ns;
    const std::size_t s = task % ns;
    const auto& spec = cfg.cancellers[c];
    const auto& sd = seeds[s];
    const McsLut* lut = spec.config.algorithm == Algorithm::Lut ? &luts[c] : nullptr;
    auto trace = run_canceller(spec.config, sd.stream.samples, sd.rx, sd.stream.mcs, lut);
    std::vector<double> p(trace.error.size());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::norm(trace.error[n]) / sd.si_power;
    auto& cr = res.cancellers[c];
    cr.power[s] = std::move(p);
    cr.diverged[s] = trace.diverged;
    cr.final_rank[s] = trace.final_rank;
    if (s == 0) res.first_seed_residual[c] = std::move(trace.error);
  });

  for (auto& cr : res.cancellers) {
    cr.mean_power.assign(res.length, 0.0);
    for (const auto& p : cr.power)
      for (std::size_t n = 0; n < res.length; ++n) cr.mean_power[n] += p[n];
    for (auto& v : cr.mean_power) v /= static_cast<double>(ns);
  }
  return res;
}

std::string format_mse_csv(const ScenarioResult& result) {
  const std::size_t w = result.config.mse_window;
  std::vector<std::vector<double>> windowed, inst;
  for (const auto& c : result.cancellers) {
    windowed.push_back(mse_trace_power(c.mean_power, w));
    inst.push_back(mse_trace_power(c.mean_power, 1));
  }
  std::string out;
  out.reserve(result.length * 24 * (1 + 2 * result.cancellers.size()));
  out += std::string("# aop-sic v") + kVersion + "\n";
  out += "# noise_floor_db=" + num(result.noise_floor_db) + "\n";
  out += "sample";
  for (const auto& c : result.cancellers) out += "," + c.name + "_mse_db";
  for (const auto& c : result.cancellers) out += "," + c.name + "_inst_db";
  out += "\n";
  for (std::size_t n = w; n < result.length; ++n) {
    out += std::to_string(n);
    for (const auto& t : windowed) out += "," + num(t[n]);
    for (const auto& t : inst) out += "," + num(t[n]);
    out += "\n";
  }
  return out;
}

std::string format_residual_csv(const ScenarioResult& result) {
  std::string out = std::string("# aop-sic v") + kVersion + "\n";
  out += "# seed=" + std::to_string(result.config.seeds.front()) + "\n";
  out += "sample,rx_re,rx_im";
  for (const auto& c : result.cancellers) out += "," + c.name + "_re," + c.name + "_im";
  out += "\n";
  for (std::size_t n = 0; n < result.length; ++n) {
    out += std::to_string(n) + "," + num(result.first_seed_rx[n].real()) + "," + num(result.first_seed_rx[n].imag());
    for (const auto& e : result.first_seed_residual) out += "," + num(e[n].real()) + "," + num(e[n].imag());
    out += "\n";
  }
  return out;
}

std::string format_summary_json(const ScenarioResult& result) {
  json doc;
  doc["version"] = kVersion;
  doc["scenario"] = result.config.name;
  doc["samples"] = result.length;
  doc["noise_floor_db"] = result.noise_floor_db;
  doc["seeds"] = result.config.seeds;
  doc["segment_boundaries"] = result.boundaries;
  const std::size_t ss = std::min(result.config.steady_state, result.length);
  json cs = json::array();
  for (const auto& c : result.cancellers) {
    const auto diverged = static_cast<std::size_t>(std::count(c.diverged.begin(), c.diverged.end(), true));
    cs.push_back({{"name", c.name},
                  {"algorithm", to_string(c.algorithm)},
                  {"steady_state_mse_db", mean_db(c.mean_power, result.length - ss, result.length)},
                  {"diverged_seeds", diverged},
                  {"final_rank", c.final_rank}});
  }
  doc["cancellers"] = cs;
  return doc.dump(2) + "\n";
}

void emit_csv(const ScenarioResult& result, const std::string& path) {
  if (result.cancellers.empty()) throw Error(ErrorCode::InvalidArgument, "emit_csv: no results");
  write_text_file(path, format_mse_csv(result));
}

void write_outputs(const ScenarioResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  emit_csv(result, (base / "mse.csv").string());
  write_text_file((base / "residual.csv").string(), format_residual_csv(result));
  write_text_file((base / "summary.json").string(), format_summary_json(result));
}

double mean_db(const std::vector<double>& power, std::size_t from, std::size_t to) {
  to = std::min(to, power.size());
  if (from >= to) throw Error(ErrorCode::InvalidArgument, "mean_db: empty range");
  long double s = 0.0L;
  for (std::size_t n = from; n < to; ++n) s += power[n];
  return 10.0 * std::log10(static_cast<double>(s / static_cast<long double>(to - from)));
}

std::size_t first_crossing(const std::vector<double>& power, std::size_t window, double threshold_db,
                           std::size_t from, std::size_t to) {
  to = std::min(to, power.size());
  const double thr = std::pow(10.0, threshold_db / 10.0);
  long double sum = 0.0L;
  for (std::size_t n = from; n < to; ++n) {
    sum += power[n];
    if (n >= from + window) sum -= power[n - window];
    const std::size_t cnt = std::min(n - from + 1, window);
    if (cnt == window && static_cast<double>(sum / static_cast<long double>(cnt)) <= thr) return n;
  }
  return to;
}

std::vector<PsdPoint> welch_psd(std::span<const Complex> x, std::size_t segment, double overlap) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "welch_psd: empty input");
  if (!is_power_of_two(segment)) throw Error(ErrorCode::BadLength, "welch_psd: segment must be a power of two");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::InvalidArgument, "welch_psd: overlap must lie in [0, 1)");
  if (x.size() < segment) throw Error(ErrorCode::BadLength, "welch_psd: input shorter than one segment");

  std::vector<double> w(segment);
  double wsum = 0.0;
  for (std::size_t i = 0; i < segment; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segment)));
    wsum += w[i] * w[i];
  }
  const double wnorm = wsum / static_cast<double>(segment);
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(segment) * (1.0 - overlap))));

  std::vector<double> acc(segment, 0.0);
  std::size_t nseg = 0;
  ComplexVec buf(segment);
  for (std::size_t start = 0; start + segment <= x.size(); start += hop) {
    for (std::size_t i = 0; i < segment; ++i) buf[i] = x[start + i] * w[i];
    const auto spec = fft(buf);
    for (std::size_t k = 0; k < segment; ++k) acc[k] += std::norm(spec[k]);
    ++nseg;
  }
  std::vector<PsdPoint> out(segment);
  for (std::size_t i = 0; i < segment; ++i) {
    const std::size_t k = (i + segment / 2) % segment;  // centre DC
    const double p = acc[k] / static_cast<double>(nseg) / wnorm;
    out[i].frequency = (static_cast<double>(i) - static_cast<double>(segment / 2)) / static_cast<double>(segment);
    out[i].power_db = 10.0 * std::log10(std::max(p, 1e-300));
  }
  return out;
}

std::string psd_csv_from_residual_csv(const std::string& csv_text, std::size_t segment, double overlap) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      cols.resize(header.size());
      continue;
    }
    if (cells.size() != header.size()) throw Error(ErrorCode::IoError, "psd: ragged CSV row");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        cols[i].push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "psd: non-numeric cell '" + cells[i] + "'");
      }
    }
  }
  std::vector<std::string> names;
  std::vector<std::vector<PsdPoint>> spectra;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h.size() < 3 || h.compare(h.size() - 3, 3, "_re") != 0) continue;
    const std::string stem = h.substr(0, h.size() - 3);
    const auto it = std::find(header.begin(), header.end(), stem + "_im");
    if (it == header.end()) continue;
    const auto& re = cols[i];
    const auto& im = cols[static_cast<std::size_t>(it - header.begin())];
    ComplexVec x(re.size());
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = {re[n], im[n]};
    names.push_back(stem);
    spectra.push_back(welch_psd(x, segment, overlap));
  }
  if (names.empty()) throw Error(ErrorCode::IoError, "psd: no <name>_re/<name>_im column pairs found");
  std::string out = std::string("# aop-sic v") + kVersion + "\nfrequency";
  for (const auto& n : names) out += "," + n + "_psd_db";
  out += "\n";
  for (std::size_t k = 0; k < segment; ++k) {
    out += num(spectra[0][k].frequency);
    for (const auto& s : spectra) out += "," + num(s[k].power_db);
    out += "\n";
  }
  return out;
}

std::vector<QamTableRow> qam_table(int max_order) {
  if (max_order < 5 || max_order % 2 == 0) throw Error(ErrorCode::InvalidArgument, "table: P must be odd and >= 5");
  std::vector<QamTableRow> rows;
  for (int order : {4, 16, 64, 256}) {
    QamTableRow row;
    row.order = order;
    const auto mu = qam_moments(qam_constellation(order), static_cast<std::size_t>(max_order));
    row.moments.assign(mu.values().begin(), mu.values().end());
    row.basis = build_basis(mu, max_order);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Four-digit roundings of the same quantities, kept next to the computed
// values so a reader can compare against commonly quoted figures.
json rounded_reference(int order) {
  switch (order) {
    case 4: return {{"moments", {1, 1, 1, 1}}, {"effective_rank", 1}};
    case 16:
      return {{"moments", {1, 1.32, 1.96, 3.1248}}, {"norm_sq", {1, 0.2176, 0.0542}}, {"monic_3", {1.30, -2.47, 1}}};
    case 64:
      return {{"moments", {1, 1.381, 2.2258, 3.9630}}, {"norm_sq", {1, 0.3188, 0.1421}}, {"monic_3", {1.6268, -2.7898, 1}}};
    case 256:
      return {{"moments", {1, 1.3953, 2.2922, 4.1910}}, {"norm_sq", {1, 0.3453, 0.1772}}, {"monic_3", {1.7189, -2.8747, 1}}};
    default: return json::object();
  }
}

}  // namespace

std::string qam_table_json(const std::vector<QamTableRow>& rows) {
  json doc = json::array();
  for (const auto& r : rows) {
    doc.push_back({{"modulation", std::to_string(r.order) + "qam"},
                   {"moments", r.moments},
                   {"effective_rank", r.basis.effective_rank},
                   {"monic", r.basis.monic},
                   {"norm_sq", r.basis.norm_sq},
                   {"coeffs", r.basis.coeffs},
                   {"rounded_reference", rounded_reference(r.order)}});
  }
  return doc.dump(2) + "\n";
}

std::string qam_table_text(const std::vector<QamTableRow>& rows) {
  std::ostringstream os;
  char buf[256];
  for (const auto& r : rows) {
    os << r.order << "QAM\n  moments:";
    for (std::size_t k = 0; k < std::min<std::size_t>(4, r.moments.size()); ++k) {
      std::snprintf(buf, sizeof buf, " %.4f", r.moments[k]);
      os << buf;
    }
    os << "\n";
    if (r.basis.effective_rank == 1) os << "  rank 1: only phi_1(x) = x exists\n";
    for (int p = 0; p < r.basis.effective_rank; ++p) {
      const auto& m = r.basis.monic[static_cast<std::size_t>(p)];
      std::snprintf(buf, sizeof buf, "  phi_%d = (1/sqrt(%.4f)) (", p + 1, r.basis.norm_sq[static_cast<std::size_t>(p)]);
      os << buf;
      for (std::size_t k = m.size(); k-- > 0;) {
        const char* term = k == 0 ? "x" : nullptr;
        std::string t = term ? term : "|x|^" + std::to_string(2 * k) + " x";
        std::snprintf(buf, sizeof buf, "%s%+.4f %s", k + 1 == m.size() ? "" : " ", m[k], t.c_str());
        os << buf;
      }
      os << ")\n";
    }
  }
  return os.str();
}

}  // namespace aopsic
