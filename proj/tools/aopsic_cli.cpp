// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aopsic/aopsic.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

int report(aopsic_status st, const std::string& context) {
  std::cerr << "aop-sic: " << context << ": " << aopsic_status_string(st);
  const std::string detail = aopsic_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << "\n";
  return st == AOPSIC_ERR_CONFIG ? kExitConfig : kExitFailure;
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { aopsic_string_free(p); }
};

bool write_or_print(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "aop-sic: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct BasisArgs {
  std::string dist = "gaussian";
  double variance = 1.0;
  double half_width = 1.0;
  double rate = 1.0;
  int qam_order = 16;
  int order = 5;
  bool extended = false;
  bool lut = false;
  std::string out;
};

int cmd_basis(const BasisArgs& a) {
  if (a.lut) {
    OwnedString doc;
    if (auto st = aopsic_lut_standard_json(a.order, &doc.p)) return report(st, "lut");
    return write_or_print(a.out, doc.p) ? 0 : kExitFailure;
  }
  const std::size_t k = a.extended ? static_cast<std::size_t>(2 * a.order) : static_cast<std::size_t>(a.order);
  std::vector<double> mu(k);
  aopsic_status st = AOPSIC_OK;
  if (a.dist == "gaussian") {
    if (a.extended) {
      std::cerr << "aop-sic: --extended is only defined for the exponential distribution\n";
      return kExitConfig;
    }
    st = aopsic_moments_gaussian(a.variance, k, mu.data());
  } else if (a.dist == "uniform") {
    if (a.extended) {
      std::cerr << "aop-sic: --extended is only defined for the exponential distribution\n";
      return kExitConfig;
    }
    st = aopsic_moments_uniform(a.half_width, k, mu.data());
  } else if (a.dist == "exponential") {
    st = aopsic_moments_exponential(a.rate, k, a.extended ? 1 : 0, mu.data());
  } else if (a.dist == "qam") {
    st = aopsic_moments_qam(a.qam_order, k, mu.data());
  } else {
    std::cerr << "aop-sic: unknown distribution '" << a.dist << "'\n";
    return kExitConfig;
  }
  if (st != AOPSIC_OK) return report(st, "moments");

  aopsic_basis* basis = nullptr;
  if ((st = aopsic_basis_build(mu.data(), mu.size(), a.extended ? 1 : 0, a.order, &basis))) {
    return report(st, "basis");
  }
  OwnedString doc;
  st = aopsic_basis_to_json(basis, &doc.p);
  aopsic_basis_free(basis);
  if (st != AOPSIC_OK) return report(st, "basis");
  return write_or_print(a.out, doc.p) ? 0 : kExitFailure;
}

int cmd_table(int order, const std::string& out, bool quiet) {
  OwnedString json, text;
  if (auto st = aopsic_table(order, &json.p, &text.p)) return report(st, "table");
  if (!quiet) std::fputs(text.p, stdout);
  if (!out.empty()) return write_or_print(out, json.p) ? 0 : kExitFailure;
  if (quiet) std::fputs(json.p, stdout);
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 unsigned threads, bool quiet) {
  aopsic_scenario* sc = nullptr;
  if (auto st = aopsic_scenario_load(scenario_path.c_str(), &sc)) {
    // A missing or unreadable scenario file is a configuration problem too.
    const int code = report(st, "scenario");
    return st == AOPSIC_ERR_IO ? kExitConfig : code;
  }
  if (seed) aopsic_scenario_set_seed(sc, *seed);
  aopsic_result* res = nullptr;
  const auto st = aopsic_scenario_run(sc, threads, &res);
  aopsic_scenario_free(sc);
  if (st != AOPSIC_OK) return report(st, "simulate");

  int code = 0;
  if (auto wst = aopsic_result_write(res, out_dir.c_str())) code = report(wst, "write");
  const std::size_t n = aopsic_result_length(res);
  const std::size_t seeds = aopsic_result_seed_count(res);
  for (std::size_t i = 0; i < aopsic_result_canceller_count(res); ++i) {
    const std::size_t div = aopsic_result_diverged_seeds(res, i);
    double tail = 0.0;
    const std::size_t from = n > 2000 ? n - 2000 : 0;
    aopsic_result_mean_mse_db(res, i, from, n, &tail);
    if (!quiet) {
      std::printf("%-12s final MSE %8.2f dB  diverged %zu/%zu\n", aopsic_result_canceller_name(res, i), tail, div,
                  seeds);
    }
    if (div == seeds && code == 0) {
      std::cerr << "aop-sic: canceller '" << aopsic_result_canceller_name(res, i) << "' diverged in every seed\n";
      code = kExitDiverged;
    }
  }
  if (!quiet && code != kExitFailure) std::printf("wrote %s/{mse.csv,residual.csv,summary.json}\n", out_dir.c_str());
  aopsic_result_free(res);
  return code;
}

int cmd_psd(const std::string& input, const std::string& out, std::size_t segment, double overlap, bool quiet) {
  if (auto st = aopsic_psd_file(input.c_str(), out.c_str(), segment, overlap)) return report(st, "psd");
  if (!quiet) std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive orthonormal polynomial self-interference cancellation toolkit"};
  app.set_version_flag("--version", std::string(aopsic_version()));
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  BasisArgs basis;
  auto* b = app.add_subcommand("basis", "Build an orthonormal basis from closed-form moments and print its JSON");
  b->add_option("--dist", basis.dist, "gaussian | uniform | exponential | qam")->capture_default_str();
  b->add_option("--variance", basis.variance, "Gaussian variance")->capture_default_str();
  b->add_option("--half-width", basis.half_width, "Uniform half width")->capture_default_str();
  b->add_option("--rate", basis.rate, "Exponential rate")->capture_default_str();
  b->add_option("--qam-order", basis.qam_order, "QAM order (4, 16, 64, 256)")->capture_default_str();
  b->add_option("-P,--order", basis.order, "Maximum polynomial order")->capture_default_str();
  b->add_flag("--extended", basis.extended, "Degree 0..P polynomials in |x| (exponential only)");
  b->add_flag("--lut", basis.lut, "Emit the 4/16/64/256-QAM LUT instead of a single basis");
  b->add_option("--out", basis.out, "Output file (default stdout)");

  int table_order = 7;
  std::string table_out;
  auto* t = app.add_subcommand("table", "Moments and orthonormal polynomials of square QAM constellations");
  t->add_option("-P,--order", table_order, "Maximum polynomial order (odd, >= 5)")->capture_default_str();
  t->add_option("--out", table_out, "Write the JSON table here");

  std::string scenario;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto* s = app.add_subcommand("simulate", "Run a scenario file and write MSE traces");
  s->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--out", out_dir, "Output directory")->capture_default_str();
  s->add_option("--seed", seed, "Run only this seed");
  s->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::string psd_in;
  std::string psd_out = "psd.csv";
  std::size_t segment = 256;
  double overlap = 0.5;
  auto* p = app.add_subcommand("psd", "Welch PSD of residual streams");
  p->add_option("--input", psd_in, "residual.csv from simulate")->required()->check(CLI::ExistingFile);
  p->add_option("--out", psd_out, "Output CSV")->capture_default_str();
  p->add_option("--segment", segment, "Segment length (power of two)")->capture_default_str();
  p->add_option("--overlap", overlap, "Segment overlap fraction")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*b) return cmd_basis(basis);
  if (*t) return cmd_table(table_order, table_out, quiet);
  if (*s) return cmd_simulate(scenario, out_dir, seed, threads, quiet);
  if (*p) return cmd_psd(psd_in, psd_out, segment, overlap, quiet);
  return kExitFailure;
}
