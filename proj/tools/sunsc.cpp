#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sunsc/checks.hpp"
#include "sunsc/coherent.hpp"
#include "sunsc/scenario.hpp"

using namespace sunsc;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNumerical = 1;
constexpr int kUsage = 2;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string suite = "all";
  int n = 2;
  int N = 1;
  std::size_t samples = 100000;
};

ScenarioConfig load(const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  ScenarioConfig cfg = load_scenario(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) {
    if (*f.jobs < 1) throw ConfigError("--jobs must be >= 1");
    cfg.jobs = *f.jobs;
  }
  if (!f.format.empty()) cfg.format = f.format;
  if (!f.out.empty()) cfg.output_path = f.out;
  return cfg;
}

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output '" + path + "'");
  write(os);
}

std::string with_suffix(const std::string& path, int N) {
  const std::filesystem::path p(path);
  auto name = p.stem().string() + "_N" + std::to_string(N) + p.extension().string();
  return (p.parent_path() / name).string();
}

int cmd_check(const Flags& f) {
  const auto results = run_check_suite(f.suite, f.seed.value_or(0));
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed();
  if (f.format == "json") {
    json j = json::array();
    for (const auto& r : results)
      j.push_back({{"suite", r.suite},
                   {"invariant", r.name},
                   {"deviation", r.deviation},
                   {"tolerance", r.tolerance},
                   {"lower_bound", r.lower_bound},
                   {"passed", r.passed()}});
    emit(f.out, [&](std::ostream& os) { os << json{{"passed", ok}, {"invariants", j}}.dump(2) << '\n'; });
  } else {
    emit(f.out, [&](std::ostream& os) {
      print_check_summary(os, results);
      os << (ok ? "all invariants hold" : "invariant failures") << '\n';
    });
  }
  return ok ? kOk : kNumerical;
}

int cmd_run(const Flags& f, RunMode mode) {
  const ScenarioConfig cfg = load(f);
  bool failed = false;
  std::vector<RunReport> reports;
  for (int N : cfg.N) {
    reports.push_back(run_scenario(cfg, mode, N));
    failed = failed || reports.back().has_numerical_failure();
  }
  if (reports.size() == 1) {
    emit(cfg.output_path, [&](std::ostream& os) { write_report(os, reports.front(), cfg.format); });
  } else if (!cfg.output_path.empty()) {
    for (const auto& r : reports)
      emit(with_suffix(cfg.output_path, r.rows.front().N),
           [&](std::ostream& os) { write_report(os, r, cfg.format); });
  } else if (cfg.format == "json") {
    json all = json::array();
    for (const auto& r : reports) all.push_back(to_json(r));
    std::cout << json{{"reports", all}}.dump(2) << '\n';
  } else {
    for (const auto& r : reports) write_report(std::cout, r, cfg.format);
  }
  return failed ? kNumerical : kOk;
}

int cmd_sweep(const Flags& f) {
  const ScenarioConfig cfg = load(f);
  bool failed = false;
  json summary = json::array();
  std::vector<RunReport> reports;
  double previous = INFINITY;
  bool decreasing = true;
  for (int N : cfg.N) {
    auto report = run_scenario(cfg, RunMode::Compare, N);
    failed = failed || report.has_numerical_failure();
    const double median = report.median_rel_err();
    decreasing = decreasing && median < previous;
    previous = median;
    summary.push_back({{"N", N}, {"median_rel_err", median}});
    reports.push_back(std::move(report));
  }
  if (!cfg.output_path.empty()) {
    for (const auto& r : reports)
      emit(with_suffix(cfg.output_path, r.rows.front().N),
           [&](std::ostream& os) { write_report(os, r, cfg.format); });
  }
  if (cfg.format == "json") {
    json j{{"medians", summary}, {"monotone_decreasing", decreasing}};
    if (cfg.output_path.empty()) {
      json all = json::array();
      for (const auto& r : reports) all.push_back(to_json(r));
      j["reports"] = all;
    }
    std::cout << j.dump(2) << '\n';
  } else {
    if (cfg.output_path.empty())
      for (const auto& r : reports) write_report(std::cout, r, "csv");
    std::cout << "N,median_rel_err\n";
    char buf[32];
    for (const auto& s : summary) {
      std::snprintf(buf, sizeof buf, "%.16e", s["median_rel_err"].get<double>());
      std::cout << s["N"].get<int>() << ',' << buf << '\n';
    }
    std::cout << "# monotone_decreasing=" << (decreasing ? "true" : "false") << '\n';
  }
  return failed ? kNumerical : kOk;
}

int cmd_identity_mc(const Flags& f) {
  const std::uint64_t seed = f.seed.value_or(0);
  const auto est = identity_resolution_mc(f.n, f.N, f.samples, seed);
  const double worst = est.max_sigma_deviation();
  json entries = json::array();
  for (Eigen::Index r = 0; r < est.estimate.rows(); ++r)
    for (Eigen::Index c = 0; c < est.estimate.cols(); ++c)
      entries.push_back({{"row", r},
                         {"col", c},
                         {"value", {est.estimate(r, c).real(), est.estimate(r, c).imag()}},
                         {"stderr", {est.stderr_re(r, c), est.stderr_im(r, c)}}});
  const bool ok = worst <= 3.0;
  json j{{"n", f.n},         {"N", f.N},
         {"samples", est.samples}, {"seed", seed},
         {"max_sigma_deviation", std::isfinite(worst) ? json(worst) : json("inf")},
         {"passed", ok},     {"entries", entries}};
  emit(f.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SU(n) coherent-state semiclassical propagator engine"};
  app.set_version_flag("--version", engine_version());
  app.require_subcommand(1);
  Flags f;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "scenario JSON")->required();
    sub->add_option("--out", f.out, "output path (default stdout)");
    sub->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", f.seed);
    sub->add_option("--jobs", f.jobs);
  };

  auto* check = app.add_subcommand("check", "run invariant suites");
  check->add_option("--suite", f.suite, "matrices|oracle|gradients|trace|glauber|fock|all");
  check->add_option("--out", f.out);
  check->add_option("--format", f.format)->check(CLI::IsMember({"text", "json"}));
  check->add_option("--seed", f.seed);

  auto* exact = app.add_subcommand("exact", "exact propagator only");
  auto* sc = app.add_subcommand("sc", "semiclassical propagator only");
  auto* compare = app.add_subcommand("compare", "exact and semiclassical with errors");
  auto* sweep = app.add_subcommand("sweep", "compare at every N with a medians summary");
  for (auto* sub : {exact, sc, compare, sweep}) add_run_flags(sub);

  auto* mc = app.add_subcommand("identity-mc", "Monte Carlo resolution of the identity");
  mc->add_option("--n", f.n)->required();
  mc->add_option("--N", f.N)->required();
  mc->add_option("--samples", f.samples);
  mc->add_option("--seed", f.seed);
  mc->add_option("--out", f.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(f);
    if (*exact) return cmd_run(f, RunMode::Exact);
    if (*sc) return cmd_run(f, RunMode::Semiclassical);
    if (*compare) return cmd_run(f, RunMode::Compare);
    if (*sweep) return cmd_sweep(f);
    if (*mc) return cmd_identity_mc(f);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
