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

// Command-line front end: single-point reports, parameter sweeps and the
// built-in invariant checks.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdemon/sweep.hpp"
#include "qdemon/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

struct Overrides {
  std::string config;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<int> window;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("config", o.config, "JSON configuration file (defaults are used when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--workers", o.workers, "Worker threads for independent grid points")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--tol", o.tol, "Steady-state convergence tolerance (trace distance)")->check(CLI::PositiveNumber);
  cmd->add_option("--window", o.window, "Number of upcoming tape sites in the entropy window")->check(CLI::Range(1, 8));
}

qdemon::sweep::SweepConfig resolve_config(const Overrides& o) {
  qdemon::sweep::SweepConfig cfg;
  if (!o.config.empty()) cfg = qdemon::sweep::load_config(o.config);
  if (o.workers) cfg.run.workers = *o.workers;
  if (o.out) cfg.run.out = *o.out;
  if (o.tol) cfg.solver.tol = *o.tol;
  if (o.window) {
    cfg.solver.window = *o.window;
    cfg.solver.max_window = std::max(cfg.solver.max_window, *o.window);
  }
  return cfg;
}

int report_config_error(const Overrides& o, const qdemon::sweep::ConfigError& e) {
  std::string where = o.config.empty() ? "<config>" : o.config;
  if (e.line() > 0) where += ":" + std::to_string(e.line());
  if (e.column() > 0) where += ":" + std::to_string(e.column());
  std::cerr << where << ": error: " << e.what() << "\n";
  return kExitConfig;
}

int run_simulate(const Overrides& o) {
  const auto cfg = resolve_config(o);
  const auto report = qdemon::sweep::simulate(cfg);
  const auto json = qdemon::sweep::report_json(report);
  std::cout << json.dump(2) << "\n";
  if (o.out) {
    qdemon::sweep::OutputSet out(cfg.run.out);
    out.write("simulate.json", json.dump(2) + "\n");
    out.commit();
  }
  return report.residual_global < qdemon::sweep::kGlobalResidualFloor ? kExitViolation : kExitOk;
}

int run_sweep(const std::string& command, const Overrides& o) {
  const auto outcome = qdemon::sweep::run_sweep(command, resolve_config(o));
  const auto& s = outcome.stats;
  std::cerr << command << ": " << s.points << " points, " << s.errors << " with errors -> " << outcome.csv.string()
            << "\n";
  return s.violations > 0 ? kExitViolation : kExitOk;
}

int run_verify(const Overrides& o) {
  const auto cfg = resolve_config(o);
  qdemon::sweep::DemonConfig demon = cfg.demon;
  if (!demon.has_temperature()) demon.epsilon = 0.01;
  bool all = true;
  for (const auto& c : qdemon::verify::run_checks(demon.resolve())) {
    all = all && c.passed;
    std::printf("%s  %-62s value=%.3e bound=%.1e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.threshold);
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous quantum Maxwell demon: steady-state thermodynamics on correlated tapes"};
  app.set_version_flag("--version", std::string(QDEMON_VERSION));
  app.require_subcommand(1);

  Overrides o;
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"simulate", "Report the steady-state Clausius terms for one parameter point"},
      {"phase-diagram", "Sweep the (zeta, epsilon) plane at fixed tau"},
      {"tau-sweep", "Correlated versus uncorrelated tape across interaction times"},
      {"advantage-region", "Coherent versus dephased GHZ tape across (theta, phi, zeta_n)"},
      {"advantage-tau", "Coherent versus dephased GHZ tape across interaction times"},
      {"verify", "Run the invariant and oracle checks"},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help), o);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "simulate") return run_simulate(o);
    if (command == "verify") return run_verify(o);
    return run_sweep(command, o);
  } catch (const qdemon::sweep::ConfigError& e) {
    return report_config_error(o, e);
  } catch (const std::exception& e) {
    std::cerr << "qdemon " << command << ": error: " << e.what() << "\n";
    return kExitFailure;
  }
}
