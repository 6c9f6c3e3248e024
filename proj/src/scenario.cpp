#include "sunsc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef SUNSC_VERSION
#define SUNSC_VERSION "0.0.0"
#endif

namespace sunsc {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  if (field.empty()) throw ConfigError("config: " + why);
  throw ConfigError("config field '" + field + "': " + why);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<int>();
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) bad(field, "must be positive");
  return v;
}

Complex complex_pair(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(field, "expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vector complex_vector(const json& j, const std::string& field, Eigen::Index size) {
  if (!j.is_array()) bad(field, "expected a list of [re, im] pairs");
  if (static_cast<Eigen::Index>(j.size()) != size)
    bad(field, "expected " + std::to_string(size) + " components");
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i)
    v(i) = complex_pair(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

int index_in(const json& j, int n, const std::string& field) {
  const int k = integer(j, field);
  if (k < 0 || k >= n) bad(field, "mode index out of range");
  return k;
}

HamiltonianModel parse_model(const json& j, ScenarioConfig& cfg) {
  if (j.contains("preset")) {
    const auto preset = j.at("preset");
    if (preset != "bose_hubbard_dimer") bad("model.preset", "unknown preset");
    const double J = number(require(j, "J", "model."), "model.J");
    if (j.contains("U") == j.contains("UN")) bad("model", "give exactly one of U or UN");
    if (j.contains("UN")) {
      cfg.hubbard_J = J;
      cfg.hubbard_UN = number(j.at("UN"), "model.UN");
      return bose_hubbard_dimer(J, 0.0);
    }
    return bose_hubbard_dimer(J, number(j.at("U"), "model.U"));
  }
  const int n = integer(require(j, "n", "model."), "model.n");
  if (n < 2) bad("model.n", "need at least 2 modes");
  HamiltonianModel m(n);
  if (j.contains("h")) {
    const auto& h = j.at("h");
    if (!h.is_array()) bad("model.h", "expected a list of [j, k, [re, im]] entries");
    for (std::size_t e = 0; e < h.size(); ++e) {
      const std::string f = "model.h[" + std::to_string(e) + "]";
      if (!h[e].is_array() || h[e].size() != 3) bad(f, "expected [j, k, [re, im]]");
      m.h(index_in(h[e][0], n, f), index_in(h[e][1], n, f)) += complex_pair(h[e][2], f);
    }
  }
  if (j.contains("V")) {
    const auto& V = j.at("V");
    if (!V.is_array()) bad("model.V", "expected a list of [j, k, l, m, [re, im]] entries");
    for (std::size_t e = 0; e < V.size(); ++e) {
      const std::string f = "model.V[" + std::to_string(e) + "]";
      if (!V[e].is_array() || V[e].size() != 5) bad(f, "expected [j, k, l, m, [re, im]]");
      m.v(index_in(V[e][0], n, f), index_in(V[e][1], n, f), index_in(V[e][2], n, f),
          index_in(V[e][3], n, f)) += complex_pair(V[e][4], f);
    }
  }
  try {
    m.validate();
  } catch (const ValidationError& e) {
    bad("model", e.what());
  }
  return m;
}

std::vector<double> parse_tau(const json& j) {
  std::vector<double> grid;
  if (j.is_number()) {
    grid.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      grid.push_back(number(j[i], "tau[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    const double start = number(require(j, "start", "tau."), "tau.start");
    const double stop = number(require(j, "stop", "tau."), "tau.stop");
    const int count = integer(require(j, "count", "tau."), "tau.count");
    if (count < 1) bad("tau.count", "must be at least 1");
    if (count == 1 && start != stop) bad("tau", "a single point needs start == stop");
    for (int k = 0; k < count; ++k)
      grid.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
  } else {
    bad("tau", "expected a number, a list, or {start, stop, count}");
  }
  if (grid.empty()) bad("tau", "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) bad("tau", "times must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) bad("tau", "grid must be strictly increasing");
  }
  return grid;
}

void parse_solver(const json& j, ScenarioConfig& cfg) {
  auto& b = cfg.bvp;
  for (const auto& [key, value] : j.items()) {
    const std::string f = "solver." + key;
    if (key == "tolerance") b.tolerance = positive(value, f);
    else if (key == "max_iterations") b.max_iterations = integer(value, f);
    else if (key == "max_halvings") b.max_halvings = integer(value, f);
    else if (key == "caustic_threshold") b.caustic_threshold = positive(value, f);
    else if (key == "continuation_start") b.continuation_start = positive(value, f);
    else if (key == "continuation_factor") b.continuation_factor = positive(value, f);
    else if (key == "continuation_min_fraction") b.continuation_min_fraction = positive(value, f);
    else if (key == "atol") b.ivp.atol = positive(value, f);
    else if (key == "rtol") b.ivp.rtol = positive(value, f);
    else if (key == "max_steps") b.ivp.max_steps = static_cast<std::size_t>(positive(value, f));
    else if (key == "singular_threshold") b.ivp.singular_threshold = positive(value, f);
    else if (key == "multistart") cfg.multistart = integer(value, f);
    else if (key == "multistart_radius") cfg.multistart_radius = positive(value, f);
    else if (key == "seed") {
      if (!value.is_number_unsigned()) bad(f, "expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "jobs") cfg.jobs = integer(value, f);
    else if (key == "dimension_cap") cfg.dimension_cap = integer(value, f);
    else bad(f, "unknown option");
  }
  if (cfg.multistart < 0) bad("solver.multistart", "must be >= 0");
  if (cfg.jobs < 1) bad("solver.jobs", "must be >= 1");
  if (b.max_iterations < 0) bad("solver.max_iterations", "must be >= 0");
  if (!(b.continuation_factor > 1.0)) bad("solver.continuation_factor", "must exceed 1");
}

ScenarioConfig parse_object(const json& j) {
  ScenarioConfig cfg;
  cfg.config_hash = fnv1a(j.dump());
  cfg.model = parse_model(require(j, "model", ""), cfg);
  const int n = cfg.model.n;

  const auto& N = require(j, "N", "");
  if (N.is_array()) {
    for (std::size_t i = 0; i < N.size(); ++i)
      cfg.N.push_back(integer(N[i], "N[" + std::to_string(i) + "]"));
  } else {
    cfg.N.push_back(integer(N, "N"));
  }
  if (cfg.N.empty()) bad("N", "empty list");
  for (int v : cfg.N)
    if (v < 1) bad("N", "particle numbers must be >= 1");

  const auto& boundary = require(j, "boundary", "");
  cfg.w_i = complex_vector(require(boundary, "w_i", "boundary."), "boundary.w_i", n - 1);
  cfg.w_f = complex_vector(require(boundary, "w_f", "boundary."), "boundary.w_f", n - 1);
  cfg.tau = parse_tau(require(j, "tau", ""));
  if (j.contains("solver")) {
    if (!j.at("solver").is_object()) bad("solver", "expected an object");
    parse_solver(j.at("solver"), cfg);
  }
  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (out.contains("format")) {
      cfg.format = out.at("format").get<std::string>();
      if (cfg.format != "csv" && cfg.format != "json") bad("output.format", "csv or json");
    }
    if (out.contains("path")) cfg.output_path = out.at("path").get<std::string>();
  }
  return cfg;
}

}  // namespace

std::string engine_version() { return SUNSC_VERSION; }

HamiltonianModel ScenarioConfig::model_for(int particles) const {
  if (hubbard_UN) return bose_hubbard_dimer(*hubbard_J, *hubbard_UN / particles);
  return model;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config ") + e.what());
  }
  if (!j.is_object()) bad("", "top level must be an object");
  try {
    return parse_object(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

bool RunReport::has_numerical_failure() const {
  if (mode == RunMode::Exact) {
    return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.row.has_exact; });
  }
  return std::any_of(rows.begin(), rows.end(),
                     [](const auto& r) { return !r.row.has_semiclassical; });
}

double RunReport::median_rel_err() const {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.row.has_exact && r.row.has_semiclassical) v.push_back(r.row.rel_err);
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

RunReport run_scenario(const ScenarioConfig& cfg, RunMode mode, int N) {
  const HamiltonianModel model = cfg.model_for(N);
  if (mode != RunMode::Semiclassical) {
    const long long dim = fock_dimension(model.n, N);
    if (dim > cfg.dimension_cap)
      throw CapacityError("Fock dimension " + std::to_string(dim) + " for N = " + std::to_string(N) +
                              " exceeds the cap " + std::to_string(cfg.dimension_cap),
                          dim);
  }
  ComparisonOptions opts;
  opts.bvp = cfg.bvp;
  opts.exact = mode != RunMode::Semiclassical;
  opts.semiclassical = mode != RunMode::Exact;
  opts.jobs = cfg.jobs;
  opts.dimension_cap = cfg.dimension_cap;

  RunReport report;
  report.mode = mode;
  report.config_hash = cfg.config_hash;
  report.engine_version = engine_version();
  report.seed = cfg.seed;
  for (auto& row : propagator_vs_exact(model, N, cfg.w_i, cfg.w_f, cfg.tau, opts)) {
    ReportRow r;
    r.N = N;
    r.row = std::move(row);
    report.rows.push_back(std::move(r));
  }
  if (opts.semiclassical && cfg.multistart > 0) {
    for (auto& r : report.rows) {
      if (r.row.tau == 0.0) continue;
      ShootingProblem prob{model, N, cfg.w_i, cfg.w_f.conjugate(), r.row.tau, cfg.bvp};
      const auto sols = solve_multistart(prob, cfg.multistart, cfg.multistart_radius, cfg.seed);
      for (const auto& s : sols) {
        if (r.row.has_semiclassical && (s.wbar0 - sols.front().wbar0).norm() == 0.0) continue;
        Alternative a;
        a.wbar0 = s.wbar0;
        try {
          a.amplitude = assemble_propagator(s, cfg.w_i, cfg.w_f, N, model.n).amplitude;
        } catch (const Error&) {
          a.amplitude = Complex(std::nan(""), std::nan(""));
        }
        r.alternatives.push_back(std::move(a));
      }
    }
  }
  return report;
}

namespace {

std::string sci(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Exact: return "exact";
    case RunMode::Semiclassical: return "sc";
    case RunMode::Compare: return "compare";
  }
  return "";
}

}  // namespace

void write_csv(std::ostream& os, const RunReport& report) {
  os << "# config_hash=" << hex(report.config_hash) << " engine_version=" << report.engine_version
     << " seed=" << report.seed << " mode=" << mode_name(report.mode) << '\n';
  os << "tau,N,K_exact_re,K_exact_im,K_sc_re,K_sc_im,abs_err,rel_err,residual,det_M22_abs,"
        "branch_index,flags\n";
  for (const auto& rr : report.rows) {
    const auto& r = rr.row;
    const bool both = r.has_exact && r.has_semiclassical;
    os << sci(r.tau) << ',' << rr.N << ',';
    os << (r.has_exact ? sci(r.exact.real()) + ',' + sci(r.exact.imag()) : std::string(",")) << ',';
    os << (r.has_semiclassical ? sci(r.semiclassical.real()) + ',' + sci(r.semiclassical.imag())
                               : std::string(","))
       << ',';
    os << (both ? sci(r.abs_err) + ',' + sci(r.rel_err) : std::string(",")) << ',';
    if (r.has_semiclassical) {
      os << sci(r.result.diagnostics.residual) << ',' << sci(r.result.diagnostics.det_M22_abs)
         << ',' << r.result.branch_index;
    } else {
      os << ",,";
    }
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    for (const auto& w : r.result.diagnostics.warnings) flags += (flags.empty() ? "warning: " : ";warning: ") + w;
    os << ',' << (flags.empty() ? "" : csv_quote(flags)) << '\n';
  }
}

json to_json(const RunReport& report) {
  json j;
  j["provenance"] = {{"config_hash", hex(report.config_hash)},
                     {"engine_version", report.engine_version},
                     {"seed", report.seed},
                     {"mode", mode_name(report.mode)}};
  auto pair = [](Complex z) { return json::array({z.real(), z.imag()}); };
  json rows = json::array();
  for (const auto& rr : report.rows) {
    const auto& r = rr.row;
    json row = {{"tau", r.tau}, {"N", rr.N}};
    row["K_exact"] = r.has_exact ? pair(r.exact) : json(nullptr);
    row["K_sc"] = r.has_semiclassical ? pair(r.semiclassical) : json(nullptr);
    if (r.has_exact && r.has_semiclassical) {
      row["abs_err"] = r.abs_err;
      row["rel_err"] = r.rel_err;
    }
    if (r.has_semiclassical) {
      const auto& res = r.result;
      row["residual"] = res.diagnostics.residual;
      row["det_M22_abs"] = res.diagnostics.det_M22_abs;
      row["branch_index"] = res.branch_index;
      row["log_parts"] = {{"iSc", pair(res.log_parts.iSc)},
                          {"iI", pair(res.log_parts.iI)},
                          {"norm_term", pair(res.log_parts.norm_term)},
                          {"half_log_det", pair(res.log_parts.half_log_det)}};
      row["diagnostics"] = {{"det_M22_ratio", res.diagnostics.det_M22_ratio},
                            {"energy_drift", res.diagnostics.energy_drift},
                            {"liouville_defect", res.diagnostics.liouville_defect},
                            {"newton_iterations", res.diagnostics.newton_iterations},
                            {"warnings", res.diagnostics.warnings}};
    }
    row["flags"] = r.flags;
    if (!rr.alternatives.empty()) {
      json alts = json::array();
      for (const auto& a : rr.alternatives) {
        json wb = json::array();
        for (Eigen::Index i = 0; i < a.wbar0.size(); ++i) wb.push_back(pair(a.wbar0(i)));
        alts.push_back({{"wbar0", wb},
                        {"K_sc", std::isnan(a.amplitude.real()) ? json(nullptr) : pair(a.amplitude)}});
      }
      row["alternatives"] = alts;
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

void write_report(std::ostream& os, const RunReport& report, const std::string& format) {
  if (format == "json") {
    os << to_json(report).dump(2) << '\n';
  } else {
    write_csv(os, report);
  }
}

}  // namespace sunsc
