// Copyright 2026 The wavehum Authors
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

// Command-line runner for the experiments. Exit status: 0 success,
// 2 configuration error, 3 numerical failure (the failing check is named).

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "wavehum/experiments.hpp"

using namespace wavehum;

namespace {

using Runner = RunOutcome (*)(const ExperimentConfig&, const std::filesystem::path&);

const std::map<std::string, std::pair<Runner, const char*>>& runners() {
  static const std::map<std::string, std::pair<Runner, const char*>> table = {
      {"simulate", {run_simulate, "forward run without control; writes ledger.csv"}},
      {"adjoint", {run_adjoint, "backward run; writes observation.csv"}},
      {"observability", {run_observability, "Rayleigh quotients of the dense Gramian per horizon"}},
      {"hum", {run_hum, "minimise J, synthesise and verify the null control; writes control.csv"}},
      {"mixing", {run_mixing, "two noisy ensembles, energy distance and covariance z-scores"}},
      {"lyapunov", {run_lyapunov, "stationary covariance oracle; writes lyapunov.csv"}},
      {"checks", {run_checks, "fast invariant suite; nonzero exit on any failure"}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavehum: acoustic wave equation with a boundary membrane"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_dir, "output directory (default: outputs.directory)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides noise.seed");
  app.add_flag("--quiet", quiet, "do not print the report");
  for (const auto& [name, entry] : runners()) app.add_subcommand(name, entry.second)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed_opt->count() > 0) cfg.noise.seed = seed;
    cfg.validate();
    const std::filesystem::path out = out_dir.empty() ? cfg.outputs.directory : out_dir;
    const RunOutcome r = runners().at(sub).first(cfg, out);
    if (!quiet) std::cout << r.report.str();
    if (!r.failures.empty()) {
      for (const auto& f : r.failures) std::cerr << "wavehum " << sub << ": check failed: " << f << '\n';
      return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "wavehum: config error";
    if (e.line() > 0) std::cerr << " at line " << e.line();
    if (!e.field().empty()) std::cerr << " (" << e.field() << ")";
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "wavehum " << sub << ": numerical failure after " << e.iterations()
              << " iterations: " << e.what() << '\n';
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "wavehum " << sub << ": numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "wavehum " << sub << ": " << e.what() << '\n';
    return 3;
  }
}
