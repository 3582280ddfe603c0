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

#include "wavehum/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "wavehum/io.hpp"

namespace wavehum {

namespace {

using Slot = std::variant<double*, int*, std::uint64_t*, std::string*>;

std::map<std::string, Slot> slots(ExperimentConfig& c) {
  return {
      {"geometry.r0", &c.geometry.r0},
      {"geometry.r1", &c.geometry.r1},
      {"geometry.Nr", &c.geometry.Nr},
      {"geometry.Ntheta", &c.geometry.Ntheta},
      {"physics.rho", &c.physics.rho},
      {"physics.kappa", &c.physics.kappa},
      {"physics.m", &c.physics.m},
      {"physics.sigma", &c.physics.sigma},
      {"physics.d", &c.physics.d},
      {"physics.k", &c.physics.k},
      {"horizon.T", &c.horizon.T},
      {"horizon.dt", &c.horizon.dt},
      {"horizon.eps0", &c.horizon.eps0},
      {"initial.amplitude", &c.initial.amplitude},
      {"hum.cg_tol", &c.hum.cg_tol},
      {"hum.max_iter", &c.hum.max_iter},
      {"hum.tikhonov", &c.hum.tikhonov},
      {"hum.obs_norm", &c.hum.obs_norm},
      {"hum.method", &c.hum.method},
      {"hum.sign_override", &c.hum.sign_override},
      {"observability.Nr", &c.observability.Nr},
      {"observability.Ntheta", &c.observability.Ntheta},
      {"observability.n_samples", &c.observability.n_samples},
      {"observability.obs_norm", &c.observability.obs_norm},
      {"observability.T_values", &c.observability.T_values},
      {"noise.n_modes", &c.noise.n_modes},
      {"noise.q0", &c.noise.q0},
      {"noise.decay_s", &c.noise.decay_s},
      {"noise.seed", &c.noise.seed},
      {"noise.n_paths", &c.noise.n_paths},
      {"noise.Nr", &c.noise.Nr},
      {"noise.Ntheta", &c.noise.Ntheta},
      {"noise.dt", &c.noise.dt},
      {"noise.T_final", &c.noise.T_final},
      {"noise.n_checkpoints", &c.noise.n_checkpoints},
      {"noise.n_permutations", &c.noise.n_permutations},
      {"noise.threads", &c.noise.threads},
      {"outputs.directory", &c.outputs.directory},
      {"outputs.decimation", &c.outputs.decimation},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void require(bool ok, const char* what, const char* field) {
  if (!ok) throw ConfigError(what, field);
}

AnnulusGrid checked_grid(double r0, double r1, int nr, int nt, const std::string& section) {
  try {
    return build_grid(r0, r1, nr, nt);
  } catch (const ConfigError& e) {
    const std::string f = e.field().empty() ? section : e.field();
    throw ConfigError(e.what(), f);
  }
}

}  // namespace

PhysicalParams ExperimentConfig::params() const {
  return {physics.rho, physics.kappa, physics.m, physics.sigma, physics.d, physics.k};
}

AnnulusGrid ExperimentConfig::grid() const {
  return checked_grid(geometry.r0, geometry.r1, geometry.Nr, geometry.Ntheta, "geometry");
}

AnnulusGrid ExperimentConfig::observability_grid() const {
  return checked_grid(geometry.r0, geometry.r1, observability.Nr, observability.Ntheta,
                      "observability");
}

AnnulusGrid ExperimentConfig::noise_grid() const {
  return checked_grid(geometry.r0, geometry.r1, noise.Nr, noise.Ntheta, "noise");
}

NoiseModel ExperimentConfig::noise_model() const {
  NoiseModel nm;
  nm.n_modes = noise.n_modes;
  nm.q0 = noise.q0;
  nm.decay_s = noise.decay_s;
  nm.seed = noise.seed;
  return nm;
}

HumOptions ExperimentConfig::hum_options() const {
  HumOptions o;
  o.krylov.tol = hum.cg_tol;
  o.krylov.max_iter = hum.max_iter;
  o.krylov.method = hum.method == "cg" ? KrylovMethod::cg : KrylovMethod::cr;
  o.tikhonov = hum.tikhonov;
  return o;
}

std::vector<double> ExperimentConfig::observability_horizons() const {
  std::vector<double> out;
  std::stringstream ss(observability.T_values);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double t = 0;
    if (!parse_number(trim(item), t) || !(t > 0))
      throw ConfigError("T_values must be a comma-separated list of positive numbers",
                        "observability.T_values");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError("T_values is empty", "observability.T_values");
  return out;
}

void ExperimentConfig::validate() const {
  const AnnulusGrid g = grid();
  const PhysicalParams p = params();
  if (p.seminorm_warning())
    throw ConfigError("k = sigma = 0 leaves the membrane displacement uncontrolled by the energy",
                      "physics.k");
  require(horizon.T > 0, "T must be > 0", "horizon.T");
  require(horizon.dt > 0 && horizon.dt <= horizon.T, "dt must be in (0, T]", "horizon.dt");
  require(horizon.eps0 > 0 && horizon.eps0 < horizon.T / 2, "eps0 must be in (0, T/2)",
          "horizon.eps0");
  require(std::isfinite(initial.amplitude), "amplitude must be finite", "initial.amplitude");
  require(hum.cg_tol > 0 && hum.cg_tol < 1, "cg_tol must be in (0, 1)", "hum.cg_tol");
  require(hum.max_iter >= 1, "max_iter must be >= 1", "hum.max_iter");
  require(hum.tikhonov >= 0, "tikhonov must be >= 0", "hum.tikhonov");
  try {
    parse_obs_norm(hum.obs_norm);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "hum.obs_norm");
  }
  require(hum.method == "cg" || hum.method == "cr", "method must be cg or cr", "hum.method");
  require(hum.sign_override >= -1 && hum.sign_override <= 1, "sign_override must be -1, 0 or 1",
          "hum.sign_override");
  observability_grid();
  require(observability.n_samples >= 1, "n_samples must be >= 1", "observability.n_samples");
  try {
    parse_obs_norm(observability.obs_norm);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "observability.obs_norm");
  }
  observability_horizons();
  const AnnulusGrid ng = noise_grid();
  noise_model().validate(ng);
  require(noise.n_paths >= 1, "n_paths must be >= 1", "noise.n_paths");
  require(noise.dt > 0 && noise.dt <= noise.T_final, "dt must be in (0, T_final]", "noise.dt");
  require(noise.T_final > 0, "T_final must be > 0", "noise.T_final");
  require(noise.n_checkpoints >= 1, "n_checkpoints must be >= 1", "noise.n_checkpoints");
  require(noise.n_permutations >= 19, "n_permutations must be >= 19", "noise.n_permutations");
  require(noise.threads >= 0, "threads must be >= 0", "noise.threads");
  require(!outputs.directory.empty(), "directory must not be empty", "outputs.directory");
  require(outputs.decimation >= 1, "decimation must be >= 1", "outputs.decimation");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  auto table = slots(cfg);
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", {}, line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'", key, line);
    if (auto [prev, fresh] = seen.emplace(key, line); !fresh)
      throw ConfigError("duplicate key (first set on line " + std::to_string(prev->second) + ")",
                        key, line);
    const bool ok = std::visit(
        [&](auto* slot) {
          using T = std::remove_pointer_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, std::string>) {
            *slot = value;
            return !value.empty();
          } else {
            return parse_number(value, *slot);
          }
        },
        it->second);
    if (!ok) throw ConfigError("malformed value '" + value + "'", key, line);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    auto at = seen.find(e.field());
    throw ConfigError(e.what(), e.field(), at == seen.end() ? 0 : at->second);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string to_string(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  std::ostringstream os;
  for (const auto& [key, slot] : slots(copy)) {
    os << key << " = ";
    std::visit(
        [&](auto* v) {
          using T = std::remove_pointer_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            os << format_number(*v);
          else
            os << *v;
        },
        slot);
    os << '\n';
  }
  return os.str();
}

}  // namespace wavehum
