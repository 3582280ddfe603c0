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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavehum/config.hpp"

namespace wavehum {

/// Ordered `key = value` report. Every report starts with the resolved
/// configuration so that a run can be repeated from the report alone.
class Report {
 public:
  Report(std::string name, const ExperimentConfig& cfg);

  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, bool value);

  const std::string& name() const { return name_; }
  std::string str() const;

 private:
  std::string name_;
  std::string config_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Gaussian pressure bump near the membrane plus a membrane displacement
/// bump, both scaled by `amplitude`, projected onto the constraints.
StateVector default_initial_state(const AnnulusGrid& g, const PhysicalParams& p,
                                  double amplitude);

struct CheckResult {
  std::string name;
  double value = 0;
  double limit = 0;
  bool passed = false;
};

/// Outcome of one subcommand: the report plus any named failures that should
/// turn into a nonzero exit status.
struct RunOutcome {
  Report report;
  std::vector<std::string> failures;
};

/// Each runner writes its CSV files and `<name>_report.txt` into `out`.
RunOutcome run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_adjoint(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_observability(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_hum(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_mixing(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_lyapunov(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Fast invariant suite on the configured grids.
std::vector<CheckResult> invariant_checks(const ExperimentConfig& cfg);
RunOutcome run_checks(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace wavehum
