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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavehum/hum.hpp"
#include "wavehum/stochastic.hpp"

namespace wavehum {

/// Every setting of the experiment runner. Defaults are the canonical
/// configuration; `parse_config` overrides them from a flat
/// `section.key = value` file.
struct ExperimentConfig {
  struct Geometry {
    double r0 = 0.5, r1 = 1.0;
    int Nr = 24, Ntheta = 48;
  } geometry;
  struct Physics {
    double rho = 1, kappa = 1, m = 1, sigma = 0.1, d = 1, k = 1;
  } physics;
  struct Horizon {
    double T = 5, dt = 2e-3, eps0 = 0.5;
  } horizon;
  struct Initial {
    double amplitude = 1.0;  // membrane bump height of the default initial state
  } initial;
  struct Hum {
    double cg_tol = 5e-3;
    int max_iter = 200;
    double tikhonov = 0;
    std::string obs_norm = "cutoff";
    std::string method = "cr";
    int sign_override = 0;  // 0: validate the sign on every solve
  } hum;
  struct Observability {
    int Nr = 8, Ntheta = 16;
    int n_samples = 8;
    std::string obs_norm = "plain";
    std::string T_values = "0.5,2,3.5,5";
  } observability;
  struct Noise {
    int n_modes = 9;
    double q0 = 1.0, decay_s = 1.5;
    std::uint64_t seed = 12345;
    int n_paths = 2000;
    int Nr = 8, Ntheta = 16;
    double dt = 0.01, T_final = 50;
    int n_checkpoints = 5;
    int n_permutations = 199;
    int threads = 0;
  } noise;
  struct Outputs {
    std::string directory = "out";
    int decimation = 10;
  } outputs;

  PhysicalParams params() const;
  AnnulusGrid grid() const;
  AnnulusGrid observability_grid() const;
  AnnulusGrid noise_grid() const;
  NoiseModel noise_model() const;
  HumOptions hum_options() const;
  std::vector<double> observability_horizons() const;

  /// Re-checks every module invariant; throws ConfigError naming the field.
  void validate() const;
};

/// Parses `section.key = value` lines; '#' starts a comment. Unknown keys,
/// duplicates and malformed values throw ConfigError with the line number.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

/// The resolved configuration as sorted `key = value` lines; parses back to
/// the same values.
std::string to_string(const ExperimentConfig& cfg);

}  // namespace wavehum
