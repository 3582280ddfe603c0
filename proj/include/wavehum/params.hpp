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

#include <cmath>

#include "wavehum/errors.hpp"

namespace wavehum {

/// Fluid and membrane constants of the acoustic model. The wave speed is
/// derived from density and compressibility and never stored.
class PhysicalParams {
 public:
  PhysicalParams(double rho, double kappa, double m, double sigma, double d,
                 double k)
      : rho_(rho), kappa_(kappa), m_(m), sigma_(sigma), d_(d), k_(k) {
    if (!(rho > 0)) throw ConfigError("rho must be > 0", "physics.rho");
    if (!(kappa > 0)) throw ConfigError("kappa must be > 0", "physics.kappa");
    if (!(m > 0)) throw ConfigError("m must be > 0", "physics.m");
    if (!(d > 0)) throw ConfigError("d must be > 0", "physics.d");
    if (!(sigma >= 0)) throw ConfigError("sigma must be >= 0", "physics.sigma");
    if (!(k >= 0)) throw ConfigError("k must be >= 0", "physics.k");
  }

  /// rho = kappa = m = 1, sigma = 0.1, d = 1, k = 1.
  static PhysicalParams canonical() { return {1.0, 1.0, 1.0, 0.1, 1.0, 1.0}; }

  double rho() const { return rho_; }
  double kappa() const { return kappa_; }
  double m() const { return m_; }
  double sigma() const { return sigma_; }
  double d() const { return d_; }
  double k() const { return k_; }

  double c2() const { return 1.0 / (kappa_ * rho_); }
  double c() const { return std::sqrt(c2()); }

  /// With k = sigma = 0 the phase-space form does not control v itself.
  bool seminorm_warning() const { return k_ == 0.0 && sigma_ == 0.0; }

  /// Copy with d = 0, the purely skew part of the dynamics. Only used for
  /// conservation checks; the model itself requires d > 0.
  PhysicalParams without_damping() const {
    PhysicalParams p = *this;
    p.d_ = 0.0;
    return p;
  }

 private:
  double rho_, kappa_, m_, sigma_, d_, k_;
};

}  // namespace wavehum
