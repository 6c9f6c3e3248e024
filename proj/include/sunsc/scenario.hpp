#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sunsc/semiclassics.hpp"

namespace sunsc {

struct ScenarioConfig {
  HamiltonianModel model;
  /// Set for the Bose-Hubbard preset with fixed U N; the model is rebuilt per N.
  std::optional<double> hubbard_J;
  std::optional<double> hubbard_UN;
  std::vector<int> N;
  Vector w_i;
  Vector w_f;
  std::vector<double> tau;
  BvpOptions bvp;
  int multistart = 0;
  double multistart_radius = 0.5;
  std::uint64_t seed = 0;
  int jobs = 1;
  long long dimension_cap = kDefaultDimensionCap;
  std::string format = "csv";
  std::string output_path;
  std::uint64_t config_hash = 0;

  /// The model for particle number `N` (differs from `model` only for presets
  /// that scale with N).
  HamiltonianModel model_for(int N) const;
};

/// Parses a scenario. Throws ConfigError naming the offending field, or the
/// line and column of a JSON syntax error.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

enum class RunMode { Exact, Semiclassical, Compare };

struct Alternative {
  Vector wbar0;
  Complex amplitude{};
};

struct ReportRow {
  int N = 0;
  ComparisonRow row;
  std::vector<Alternative> alternatives;
};

struct RunReport {
  RunMode mode = RunMode::Compare;
  std::uint64_t config_hash = 0;
  std::string engine_version;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;

  /// True when any requested semiclassical value is missing.
  bool has_numerical_failure() const;
  double median_rel_err() const;
};

RunReport run_scenario(const ScenarioConfig& cfg, RunMode mode, int N);

std::string engine_version();

void write_csv(std::ostream& os, const RunReport& report);
nlohmann::json to_json(const RunReport& report);
void write_report(std::ostream& os, const RunReport& report, const std::string& format);

}  // namespace sunsc
