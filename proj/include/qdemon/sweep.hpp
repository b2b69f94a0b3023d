// Copyright 2026 The qdemon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdemon/lindblad.hpp"
#include "qdemon/states.hpp"
#include "qdemon/thermo.hpp"

namespace qdemon::sweep {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr double kGlobalResidualFloor = -1e-8;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Configuration problem, optionally pinned to a line/column of the source text.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Axis {
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  bool endpoint = true;
  std::vector<double> explicit_values;

  static Axis range(double lo, double hi, int n, bool include_end = true) {
    Axis a;
    a.min = lo;
    a.max = hi;
    a.count = n;
    a.endpoint = include_end;
    return a;
  }

  /// Points min·(1−t) + max·t, so symmetric ranges with odd counts hit 0 exactly.
  [[nodiscard]] std::vector<double> values() const {
    if (!explicit_values.empty()) return explicit_values;
    std::vector<double> v;
    const int denom = endpoint ? count - 1 : count;
    for (int k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) / denom;
      v.push_back(min * (1.0 - t) + max * t);
    }
    return v;
  }
};

struct FamilyConfig {
  std::string name = "ghz";  // ghz | ghz-dephased | product
  double zeta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct DemonConfig {
  double delta = 1.0;
  double beta_h = 1.0986122886681098;  // ln 3
  std::optional<double> epsilon;
  std::optional<double> beta_c;
  double tau = 0.3;
  double gamma_h = 2.0;
  double gamma_c = 2.0;

  [[nodiscard]] bool has_temperature() const { return epsilon.has_value() || beta_c.has_value(); }

  /// Physical parameters, with the thermal gradient and τ optionally swept.
  [[nodiscard]] DemonParams resolve(std::optional<double> eps = std::nullopt,
                                    std::optional<double> tau_override = std::nullopt) const {
    const double t = tau_override.value_or(tau);
    if (eps) return DemonParams::from_epsilon(*eps, beta_h, t, delta, gamma_h, gamma_c);
    if (epsilon) return DemonParams::from_epsilon(*epsilon, beta_h, t, delta, gamma_h, gamma_c);
    if (!beta_c) throw ConfigError("demon: one of 'epsilon' or 'beta_c' is required");
    DemonParams p{delta, beta_h, *beta_c, t, gamma_h, gamma_c};
    p.validate();
    return p;
  }
};

struct SolverConfig {
  int window = 4;
  double tol = 1e-12;
  int n_max = 10000;
  int max_window = 8;
  bool check_window = true;
  double window_tol = 1e-9;

  [[nodiscard]] EvaluateOptions options() const {
    EvaluateOptions o;
    o.window = window;
    o.tol = tol;
    o.n_max = n_max;
    o.max_window = max_window;
    o.check_window = check_window;
    o.window_tol = window_tol;
    return o;
  }
};

struct RunConfig {
  int workers = 1;
  std::string out = "qdemon-out";
};

struct SweepConfig {
  FamilyConfig family;
  DemonConfig demon;
  std::map<std::string, Axis> grid;
  SolverConfig solver;
  RunConfig run;
};

namespace detail {

inline std::pair<int, int> line_column(std::string_view text, std::size_t offset) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < std::min(offset, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

/// Best-effort source line of a key path: each key is searched after the previous one.
inline int locate(std::string_view text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& key : path) {
    const std::string token = "\"" + key + "\"";
    const std::size_t at = text.find(token, pos);
    if (at == std::string_view::npos) break;
    pos = at;
    found = true;
  }
  return found ? line_column(text, pos).first : 0;
}

inline std::string join_path(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& k : path) s += (s.empty() ? "" : ".") + k;
  return s.empty() ? "<root>" : s;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    const int line = locate(text_, path);
    throw ConfigError(join_path(path) + ": " + msg, line, 0);
  }

  void require_object(const nlohmann::json& j, const std::vector<std::string>& path,
                      std::initializer_list<std::string_view> allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        auto p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
  }

  double number(const nlohmann::json& j, const std::vector<std::string>& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  int integer(const nlohmann::json& j, const std::vector<std::string>& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "integer out of range");
    return static_cast<int>(v);
  }

  bool boolean(const nlohmann::json& j, const std::vector<std::string>& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const nlohmann::json& j, const std::vector<std::string>& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

 private:
  std::string_view text_;
};

inline Axis read_axis(const Reader& r, const nlohmann::json& j, const std::vector<std::string>& path) {
  Axis a;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      auto p = path;
      p.push_back(std::to_string(k));
      a.explicit_values.push_back(r.number(j[k], p));
    }
    if (a.explicit_values.empty()) r.fail(path, "value list must not be empty");
    a.count = static_cast<int>(a.explicit_values.size());
    a.min = *std::min_element(a.explicit_values.begin(), a.explicit_values.end());
    a.max = *std::max_element(a.explicit_values.begin(), a.explicit_values.end());
    return a;
  }
  r.require_object(j, path, {"min", "max", "count", "endpoint"});
  for (const char* key : {"min", "max", "count"})
    if (!j.contains(key)) r.fail(path, std::string("missing '") + key + "'");
  auto sub = [&](const char* k) {
    auto p = path;
    p.emplace_back(k);
    return p;
  };
  a.min = r.number(j["min"], sub("min"));
  a.max = r.number(j["max"], sub("max"));
  a.count = r.integer(j["count"], sub("count"));
  if (j.contains("endpoint")) a.endpoint = r.boolean(j["endpoint"], sub("endpoint"));
  if (a.count < 2) r.fail(sub("count"), "resolution must be at least 2");
  if (a.count > 100000) r.fail(sub("count"), "resolution is unreasonably large");
  if (!(a.max > a.min)) r.fail(path, "'max' must exceed 'min'");
  return a;
}

}  // namespace detail

inline const std::vector<std::string>& known_axes() {
  static const std::vector<std::string> axes{"zeta", "epsilon", "tau", "theta", "phi", "zeta_n"};
  return axes;
}

/// Parses a JSON configuration. Errors carry the offending line where known.
inline SweepConfig parse_config(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto cut = msg.find("parse error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw ConfigError("syntax error: " + msg, line, column);
  }
  const detail::Reader r(text);
  SweepConfig cfg;
  r.require_object(root, {}, {"family", "demon", "grid", "solver", "run"});

  if (root.contains("family")) {
    const auto& j = root["family"];
    r.require_object(j, {"family"}, {"name", "zeta", "theta", "phi"});
    if (j.contains("name")) cfg.family.name = r.string(j["name"], {"family", "name"});
    if (cfg.family.name != "ghz" && cfg.family.name != "ghz-dephased" && cfg.family.name != "product")
      r.fail({"family", "name"}, "must be one of ghz, ghz-dephased, product");
    if (j.contains("zeta")) cfg.family.zeta = r.number(j["zeta"], {"family", "zeta"});
    if (j.contains("theta")) cfg.family.theta = r.number(j["theta"], {"family", "theta"});
    if (j.contains("phi")) cfg.family.phi = r.number(j["phi"], {"family", "phi"});
    if (std::abs(cfg.family.zeta) > 1.0) r.fail({"family", "zeta"}, "must lie in [-1, 1]");
    if (cfg.family.theta < 0 || cfg.family.theta > std::numbers::pi) r.fail({"family", "theta"}, "must lie in [0, pi]");
  }

  if (root.contains("demon")) {
    const auto& j = root["demon"];
    r.require_object(j, {"demon"}, {"delta", "beta_h", "beta_c", "epsilon", "tau", "gamma_h", "gamma_c"});
    auto num = [&](const char* k, double& dst) {
      if (j.contains(k)) dst = r.number(j[k], {"demon", k});
    };
    num("delta", cfg.demon.delta);
    num("beta_h", cfg.demon.beta_h);
    num("tau", cfg.demon.tau);
    num("gamma_h", cfg.demon.gamma_h);
    num("gamma_c", cfg.demon.gamma_c);
    if (j.contains("epsilon")) cfg.demon.epsilon = r.number(j["epsilon"], {"demon", "epsilon"});
    if (j.contains("beta_c")) cfg.demon.beta_c = r.number(j["beta_c"], {"demon", "beta_c"});
    if (cfg.demon.epsilon && cfg.demon.beta_c) r.fail({"demon", "beta_c"}, "give either 'epsilon' or 'beta_c', not both");
    if (!(cfg.demon.delta > 0)) r.fail({"demon", "delta"}, "must be positive");
    if (cfg.demon.beta_h < 0) r.fail({"demon", "beta_h"}, "must be non-negative");
    if (cfg.demon.tau < 0) r.fail({"demon", "tau"}, "must be non-negative");
    if (!(cfg.demon.gamma_h > 0)) r.fail({"demon", "gamma_h"}, "must be positive");
    if (!(cfg.demon.gamma_c > 0)) r.fail({"demon", "gamma_c"}, "must be positive");
    if (cfg.demon.epsilon && !(*cfg.demon.epsilon >= 0 && *cfg.demon.epsilon < 1))
      r.fail({"demon", "epsilon"}, "must lie in [0, 1)");
    if (cfg.demon.beta_c && *cfg.demon.beta_c < cfg.demon.beta_h)
      r.fail({"demon", "beta_c"}, "must be at least beta_h");
  }

  if (root.contains("grid")) {
    const auto& j = root["grid"];
    if (!j.is_object()) r.fail({"grid"}, "expected an object");
    for (const auto& [key, value] : j.items()) {
      const auto& axes = known_axes();
      if (std::find(axes.begin(), axes.end(), key) == axes.end()) r.fail({"grid", key}, "unknown axis");
      cfg.grid[key] = detail::read_axis(r, value, {"grid", key});
    }
  }

  if (root.contains("solver")) {
    const auto& j = root["solver"];
    r.require_object(j, {"solver"}, {"window", "tol", "n_max", "max_window", "check_window", "window_tol"});
    if (j.contains("window")) cfg.solver.window = r.integer(j["window"], {"solver", "window"});
    if (j.contains("tol")) cfg.solver.tol = r.number(j["tol"], {"solver", "tol"});
    if (j.contains("n_max")) cfg.solver.n_max = r.integer(j["n_max"], {"solver", "n_max"});
    if (j.contains("max_window")) cfg.solver.max_window = r.integer(j["max_window"], {"solver", "max_window"});
    if (j.contains("check_window")) cfg.solver.check_window = r.boolean(j["check_window"], {"solver", "check_window"});
    if (j.contains("window_tol")) cfg.solver.window_tol = r.number(j["window_tol"], {"solver", "window_tol"});
    if (!(cfg.solver.window_tol > 0)) r.fail({"solver", "window_tol"}, "must be positive");
    if (cfg.solver.window < 1 || cfg.solver.window > 8) r.fail({"solver", "window"}, "must lie in [1, 8]");
    if (!(cfg.solver.tol > 0)) r.fail({"solver", "tol"}, "must be positive");
    if (cfg.solver.n_max < 1) r.fail({"solver", "n_max"}, "must be positive");
    if (cfg.solver.max_window < cfg.solver.window || cfg.solver.max_window > 8)
      r.fail({"solver", "max_window"}, "must lie in [window, 8]");
  }

  if (root.contains("run")) {
    const auto& j = root["run"];
    r.require_object(j, {"run"}, {"workers", "out"});
    if (j.contains("workers")) cfg.run.workers = r.integer(j["workers"], {"run", "workers"});
    if (j.contains("out")) cfg.run.out = r.string(j["out"], {"run", "out"});
    if (cfg.run.workers < 1) r.fail({"run", "workers"}, "must be at least 1");
  }
  return cfg;
}

inline SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Fully resolved configuration, defaults included, for the run manifest.
inline nlohmann::ordered_json to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["family"] = {{"name", cfg.family.name}, {"zeta", cfg.family.zeta}, {"theta", cfg.family.theta}, {"phi", cfg.family.phi}};
  nlohmann::ordered_json d;
  d["delta"] = cfg.demon.delta;
  d["beta_h"] = cfg.demon.beta_h;
  if (cfg.demon.epsilon) d["epsilon"] = *cfg.demon.epsilon;
  if (cfg.demon.beta_c) d["beta_c"] = *cfg.demon.beta_c;
  d["tau"] = cfg.demon.tau;
  d["gamma_h"] = cfg.demon.gamma_h;
  d["gamma_c"] = cfg.demon.gamma_c;
  j["demon"] = d;
  nlohmann::ordered_json g = nlohmann::ordered_json::object();
  for (const auto& [name, axis] : cfg.grid) {
    if (!axis.explicit_values.empty()) {
      g[name] = axis.explicit_values;
    } else {
      g[name] = {{"min", axis.min}, {"max", axis.max}, {"count", axis.count}, {"endpoint", axis.endpoint}};
    }
  }
  j["grid"] = g;
  j["solver"] = {{"window", cfg.solver.window},
                 {"tol", cfg.solver.tol},
                 {"n_max", cfg.solver.n_max},
                 {"max_window", cfg.solver.max_window},
                 {"check_window", cfg.solver.check_window},
                 {"window_tol", cfg.solver.window_tol}};
  j["run"] = {{"workers", cfg.run.workers}, {"out", cfg.run.out}};
  return j;
}

// ---------------------------------------------------------------------------
// Defaults per subcommand
// ---------------------------------------------------------------------------

inline void default_axis(SweepConfig& cfg, const std::string& name, Axis axis) {
  if (!cfg.grid.contains(name)) cfg.grid[name] = std::move(axis);
}

inline void apply_defaults(SweepConfig& cfg, std::string_view command) {
  if (command == "phase-diagram") {
    default_axis(cfg, "zeta", Axis::range(-0.3, 0.3, 201));
    default_axis(cfg, "epsilon", Axis::range(0.0, 0.3, 201));
  } else if (command == "tau-sweep" || command == "advantage-tau") {
    default_axis(cfg, "tau", Axis::range(0.02, 5.0, 250));
  } else if (command == "advantage-region") {
    default_axis(cfg, "theta", Axis::range(0.0, std::numbers::pi, 61));
    default_axis(cfg, "phi", Axis::range(0.0, 2 * std::numbers::pi, 60, false));
    default_axis(cfg, "zeta_n", Axis::range(-1.0, 1.0, 41));
  }
}

// ---------------------------------------------------------------------------
// Tables and CSV
// ---------------------------------------------------------------------------

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip-safe rendering at 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.header.size(); ++k) out += (k ? "," : "") + t.header[k];
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw std::logic_error("to_csv: row width differs from header");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_double(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
              out += std::to_string(v);
            } else {
              out += csv_escape(v);
            }
          },
          row[k]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// Evaluates f(0..n−1) on at most `workers` threads; results keep index order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, int workers, F&& f) {
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        out[k] = f(k);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  if (count == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(count, n); ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct PointResult {
  std::optional<ClausiusReport> report;
  std::string error;
};

struct RunStats {
  std::size_t points = 0;
  std::size_t errors = 0;
  std::size_t violations = 0;
  int max_converged_n = 0;
  double max_convergence_residual = 0.0;
  double min_residual_global = std::numeric_limits<double>::infinity();
  int max_window = 0;

  void record(PointResult& r) {
    ++points;
    if (!r.report) {
      ++errors;
      return;
    }
    const auto& rep = *r.report;
    max_converged_n = std::max(max_converged_n, rep.converged_n);
    max_convergence_residual = std::max(max_convergence_residual, rep.convergence_residual);
    min_residual_global = std::min(min_residual_global, rep.residual_global);
    max_window = std::max(max_window, rep.window);
    if (rep.residual_global < kGlobalResidualFloor) {
      ++violations;
      ++errors;
      r.error = "global Clausius residual below " + format_double(kGlobalResidualFloor);
    }
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["points"] = points;
    j["errors"] = errors;
    j["clausius_violations"] = violations;
    j["max_converged_n"] = max_converged_n;
    j["max_convergence_residual"] = max_convergence_residual;
    if (std::isfinite(min_residual_global)) {
      j["min_residual_global"] = min_residual_global;
    } else {
      j["min_residual_global"] = nullptr;
    }
    j["max_window"] = max_window;
    return j;
  }
};

inline MpdoState build_family(const FamilyConfig& f, double zeta, double theta, double phi) {
  const GhzSpec spec{zeta, theta, phi};
  if (f.name == "product") {
    if (theta != 0.0) return product(tape_marginal(ghz(spec)));
    return product(zeta);
  }
  if (f.name == "ghz-dephased") return dephase_z(ghz(spec));
  return ghz(spec);
}

inline PointResult evaluate_point(const MpdoState& input, const DemonParams& p, const EvaluateOptions& opt) {
  PointResult r;
  try {
    r.report = evaluate(input, p, opt);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

inline constexpr double kLn2 = std::numbers::ln2;

inline std::vector<std::string> report_columns(const std::string& prefix = "") {
  std::vector<std::string> cols;
  for (const char* c : {"zeta_out", "q_hc", "q_gradient"}) cols.push_back(prefix + c);
  for (const char* c : {"ds_m", "ds_mmt", "di_m_mt", "di_d_m", "di_d_mmt"}) {
    cols.push_back(prefix + c + "_nats");
    cols.push_back(prefix + c + "_bits");
  }
  for (const char* c : {"residual_local", "residual_generalized", "residual_global", "phase", "window", "converged_n"})
    cols.push_back(prefix + c);
  return cols;
}

inline void append_report(std::vector<Cell>& row, const PointResult& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!r.report) {
    for (int k = 0; k < 16; ++k) row.emplace_back(nan);
    row.emplace_back(std::string());
    row.emplace_back(std::int64_t{0});
    row.emplace_back(std::int64_t{0});
    return;
  }
  const auto& x = *r.report;
  row.emplace_back(x.zeta_out);
  row.emplace_back(x.q_hc);
  row.emplace_back(x.q_hc * (x.params.beta_c - x.params.beta_h));
  for (const double v : {x.ds_m, x.ds_mmt, x.di_m_mt, x.di_d_m, x.di_d_mmt}) {
    row.emplace_back(v);
    row.emplace_back(v / kLn2);
  }
  row.emplace_back(x.residual_local);
  row.emplace_back(x.residual_generalized);
  row.emplace_back(x.residual_global);
  row.emplace_back(std::string(to_string(x.phase)));
  row.emplace_back(std::int64_t{x.window});
  row.emplace_back(std::int64_t{x.converged_n});
}

inline std::string join_errors(const std::vector<const PointResult*>& results) {
  std::string e;
  for (const auto* r : results)
    if (!r->error.empty()) e += (e.empty() ? "" : "; ") + r->error;
  return e;
}

/// Clausius report over the (ζ, ε) plane at fixed τ.
inline Table phase_diagram(const SweepConfig& cfg, RunStats& stats) {
  if (cfg.demon.has_temperature())
    throw ConfigError("phase-diagram sweeps epsilon on the grid; remove demon.epsilon / demon.beta_c");
  const auto zetas = cfg.grid.at("zeta").values();
  const auto epss = cfg.grid.at("epsilon").values();
  const EvaluateOptions opt = cfg.solver.options();
  const std::size_t n = zetas.size() * epss.size();
  auto results = parallel_map<PointResult>(n, cfg.run.workers, [&](std::size_t k) {
    const double eps = epss[k / zetas.size()];
    const double zeta = zetas[k % zetas.size()];
    PointResult r;
    try {
      const DemonParams p = cfg.demon.resolve(eps);
      return evaluate_point(build_family(cfg.family, zeta, cfg.family.theta, cfg.family.phi), p, opt);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });
  Table t;
  t.header = {"zeta", "epsilon", "tau", "beta_h", "beta_c"};
  for (const auto& c : report_columns()) t.header.push_back(c);
  t.header.emplace_back("error");
  for (std::size_t k = 0; k < n; ++k) {
    auto& r = results[k];
    stats.record(r);
    const double eps = epss[k / zetas.size()];
    std::vector<Cell> row{zetas[k % zetas.size()], eps, cfg.demon.tau, cfg.demon.beta_h,
                          cfg.demon.beta_h + 2.0 * std::atanh(eps) / cfg.demon.delta};
    append_report(row, r);
    row.emplace_back(r.error);
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Correlated family against the uncorrelated tape with the same single-site state, over τ.
inline Table tau_sweep(const SweepConfig& cfg, RunStats& stats) {
  const auto taus = cfg.grid.at("tau").values();
  const EvaluateOptions opt = cfg.solver.options();
  (void)cfg.demon.resolve();  // fail fast on a missing temperature
  const MpdoState correlated = build_family(cfg.family, cfg.family.zeta, cfg.family.theta, cfg.family.phi);
  const MpdoState baseline = product(tape_marginal(correlated));
  const std::size_t n = taus.size();
  auto results = parallel_map<std::array<PointResult, 2>>(n, cfg.run.workers, [&](std::size_t k) {
    std::array<PointResult, 2> out;
    try {
      const DemonParams p = cfg.demon.resolve(std::nullopt, taus[k]);
      out[0] = evaluate_point(correlated, p, opt);
      out[1] = evaluate_point(baseline, p, opt);
    } catch (const std::exception& e) {
      out[0].error = e.what();
      out[1].error = e.what();
    }
    return out;
  });
  Table t;
  t.header = {"tau", "zeta", "epsilon"};
  for (const auto& c : report_columns("corr_")) t.header.push_back(c);
  for (const auto& c : report_columns("uncorr_")) t.header.push_back(c);
  t.header.emplace_back("error");
  const double eps = cfg.demon.epsilon ? *cfg.demon.epsilon
                                       : std::tanh((cfg.demon.beta_c.value_or(cfg.demon.beta_h) - cfg.demon.beta_h) *
                                                   cfg.demon.delta / 2);
  for (std::size_t k = 0; k < n; ++k) {
    auto& [c, u] = results[k];
    stats.record(c);
    stats.record(u);
    std::vector<Cell> row{taus[k], cfg.family.zeta, eps};
    append_report(row, c);
    append_report(row, u);
    row.emplace_back(join_errors({&c, &u}));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct AdvantagePoint {
  PointResult quantum;
  PointResult classical;
};

inline AdvantagePoint evaluate_advantage(const GhzSpec& spec, const DemonParams& p, EvaluateOptions opt) {
  opt.check_window = false;
  const MpdoState q = ghz(spec);
  return AdvantagePoint{evaluate_point(q, p, opt), evaluate_point(dephase_z(q), p, opt)};
}

inline void append_advantage(std::vector<Cell>& row, const AdvantagePoint& a) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!a.quantum.report || !a.classical.report) {
    for (int k = 0; k < 7; ++k) row.emplace_back(nan);
    row.emplace_back(std::int64_t{0});
    return;
  }
  const auto& q = *a.quantum.report;
  const auto& c = *a.classical.report;
  const Advantage adv = advantage(q, c);
  row.emplace_back(q.ds_m);
  row.emplace_back(c.ds_m);
  row.emplace_back(adv.difference);
  row.emplace_back(q.q_hc);
  row.emplace_back(c.q_hc);
  row.emplace_back(q.residual_global);
  row.emplace_back(c.residual_global);
  row.emplace_back(std::int64_t{adv.flag ? 1 : 0});
}

inline const std::vector<std::string>& advantage_columns() {
  static const std::vector<std::string> cols{"ds_m_q_nats", "ds_m_c_nats", "difference_nats", "q_hc_q",
                                             "q_hc_c", "residual_global_q", "residual_global_c", "advantage"};
  return cols;
}

/// Erasure advantage of the coherent GHZ family over its dephased partner across (θ, φ, ζ_n).
inline Table advantage_region(const SweepConfig& cfg, RunStats& stats) {
  const auto thetas = cfg.grid.at("theta").values();
  const auto phis = cfg.grid.at("phi").values();
  const auto zns = cfg.grid.at("zeta_n").values();
  const EvaluateOptions opt = cfg.solver.options();
  const DemonParams p = cfg.demon.resolve();
  const std::size_t n = thetas.size() * phis.size() * zns.size();
  auto coords = [&](std::size_t k) {
    const std::size_t iz = k % zns.size();
    const std::size_t ip = (k / zns.size()) % phis.size();
    const std::size_t it = k / (zns.size() * phis.size());
    return std::array<double, 3>{thetas[it], phis[ip], zns[iz]};
  };
  auto results = parallel_map<AdvantagePoint>(n, cfg.run.workers, [&](std::size_t k) {
    const auto [theta, phi, zn] = coords(k);
    try {
      return evaluate_advantage(GhzSpec{zn, theta, phi}, p, opt);
    } catch (const std::exception& e) {
      AdvantagePoint a;
      a.quantum.error = e.what();
      return a;
    }
  });
  Table t;
  t.header = {"theta", "phi", "zeta_n", "tau", "epsilon"};
  for (const auto& c : advantage_columns()) t.header.push_back(c);
  t.header.emplace_back("error");
  for (std::size_t k = 0; k < n; ++k) {
    auto& a = results[k];
    stats.record(a.quantum);
    stats.record(a.classical);
    const auto [theta, phi, zn] = coords(k);
    std::vector<Cell> row{theta, phi, zn, p.tau, epsilon(p)};
    append_advantage(row, a);
    row.emplace_back(join_errors({&a.quantum, &a.classical}));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Erasure advantage at the configured (θ, φ, ζ) as a function of τ.
inline Table advantage_tau(const SweepConfig& cfg, RunStats& stats) {
  const auto taus = cfg.grid.at("tau").values();
  const EvaluateOptions opt = cfg.solver.options();
  const GhzSpec spec{cfg.family.zeta, cfg.family.theta, cfg.family.phi};
  (void)cfg.demon.resolve();  // fail fast on a missing temperature
  auto results = parallel_map<AdvantagePoint>(taus.size(), cfg.run.workers, [&](std::size_t k) {
    try {
      return evaluate_advantage(spec, cfg.demon.resolve(std::nullopt, taus[k]), opt);
    } catch (const std::exception& e) {
      AdvantagePoint a;
      a.quantum.error = e.what();
      return a;
    }
  });
  Table t;
  t.header = {"tau", "theta", "phi", "zeta_n"};
  for (const auto& c : advantage_columns()) t.header.push_back(c);
  t.header.emplace_back("error");
  for (std::size_t k = 0; k < taus.size(); ++k) {
    auto& a = results[k];
    stats.record(a.quantum);
    stats.record(a.classical);
    std::vector<Cell> row{taus[k], spec.theta, spec.phi, spec.zeta};
    append_advantage(row, a);
    row.emplace_back(join_errors({&a.quantum, &a.classical}));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Files written by one run; anything not yet committed is removed on failure.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
    for (const auto& p : pending_) std::filesystem::remove(p, ec);
  }

  /// Writes `content` to a temporary sibling and renames it into place.
  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    const auto final_path = dir_ / name;
    const auto tmp = dir_ / (name + ".tmp");
    pending_.push_back(tmp);
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
      out << content;
      out.flush();
      if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, final_path);
    pending_.pop_back();
    written_.push_back(final_path);
  }

  void commit() { committed_ = true; }
  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> pending_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

inline nlohmann::ordered_json manifest(std::string_view command, const SweepConfig& cfg, const RunStats& stats,
                                       const std::string& csv_name, std::size_t rows, std::size_t columns) {
  nlohmann::ordered_json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["command"] = std::string(command);
#ifdef QDEMON_VERSION
  j["qdemon_version"] = QDEMON_VERSION;
#else
  j["qdemon_version"] = "unknown";
#endif
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["json_version"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                      "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["units"] = {{"entropy", "nats (bits columns divide by ln 2)"}, {"energy", "gap Delta"}, {"time", "1/Delta"}};
  j["config"] = to_json(cfg);
  j["config"]["run"].erase("out");  // the manifest sits in the output directory
  j["output"] = {{"csv", csv_name}, {"rows", rows}, {"columns", columns}};
  j["stats"] = stats.to_json();
  return j;
}

struct RunOutcome {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  RunStats stats;
};

/// Runs one sweep subcommand and writes `<name>.csv` plus `<name>.manifest.json`.
inline RunOutcome run_sweep(std::string_view command, SweepConfig cfg) {
  apply_defaults(cfg, command);
  RunStats stats;
  Table table;
  std::string name;
  if (command == "phase-diagram") {
    table = phase_diagram(cfg, stats);
    name = "phase_diagram";
  } else if (command == "tau-sweep") {
    table = tau_sweep(cfg, stats);
    name = "tau_sweep";
  } else if (command == "advantage-region") {
    table = advantage_region(cfg, stats);
    name = "advantage_region";
  } else if (command == "advantage-tau") {
    table = advantage_tau(cfg, stats);
    name = "advantage_tau";
  } else {
    throw std::invalid_argument("unknown sweep '" + std::string(command) + "'");
  }
  OutputSet out(cfg.run.out);
  const std::string csv = name + ".csv";
  out.write(csv, to_csv(table));
  out.write(name + ".manifest.json",
            manifest(command, cfg, stats, csv, table.rows.size(), table.header.size()).dump(2) + "\n");
  out.commit();
  return RunOutcome{out.dir() / csv, out.dir() / (name + ".manifest.json"), stats};
}

/// Single-point report as JSON.
inline nlohmann::ordered_json report_json(const ClausiusReport& r) {
  nlohmann::ordered_json j;
  j["params"] = {{"delta", r.params.delta},     {"beta_h", r.params.beta_h},   {"beta_c", r.params.beta_c},
                 {"tau", r.params.tau},         {"gamma_h", r.params.gamma_h}, {"gamma_c", r.params.gamma_c},
                 {"epsilon", epsilon(r.params)}};
  j["zeta_in"] = r.zeta_in;
  j["zeta_out"] = r.zeta_out;
  j["q_hc"] = r.q_hc;
  j["ds_m"] = r.ds_m;
  j["ds_mmt"] = r.ds_mmt;
  j["di_m_mt"] = r.di_m_mt;
  j["di_d_m"] = r.di_d_m;
  j["di_d_mmt"] = r.di_d_mmt;
  j["ds_d"] = r.ds_d;
  j["mi_gap"] = r.mi_gap;
  j["residual_local"] = r.residual_local;
  j["residual_generalized"] = r.residual_generalized;
  j["residual_global"] = r.residual_global;
  j["phase"] = to_string(r.phase);
  j["window"] = r.window;
  j["converged_n"] = r.converged_n;
  j["convergence_residual"] = r.convergence_residual;
  return j;
}

inline ClausiusReport simulate(const SweepConfig& cfg) {
  const MpdoState input = build_family(cfg.family, cfg.family.zeta, cfg.family.theta, cfg.family.phi);
  return evaluate(input, cfg.demon.resolve(), cfg.solver.options());
}

}  // namespace qdemon::sweep
