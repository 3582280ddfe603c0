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

#include <algorithm>
#include <cmath>
#include <random>

#include "wavehum/model.hpp"

namespace wavehum::testing {

inline Eigen::VectorXd uniform_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
  return x;
}

template <PhaseLike T = StateVector>
T random_state(const AnnulusGrid& g, std::mt19937_64& rng) {
  T s(g);
  s.data() = uniform_vector(s.size(), rng);
  return s;
}

/// Low-order polar harmonics with random coefficients, projected onto the
/// constraints.
template <PhaseLike T = StateVector>
T smooth_state(const AnnulusGrid& g, const PhysicalParams& p,
               std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  T s(g);
  for (int blk = 0; blk < 4; ++blk) {
    auto b = s.block(blk);
    const bool interior = blk % 2 == 0;
    for (int j = 0; j < 4; ++j) {
      for (int pw = 0; pw < (interior ? 3 : 1); ++pw) {
        const double a = n01(rng), c = n01(rng);
        for (int i = 0; i < (interior ? g.nr() : 1); ++i) {
          const double r = interior ? g.radius(i) : g.r1();
          for (int k = 0; k < g.ntheta(); ++k) {
            const double th = g.theta(k);
            const int idx = interior ? g.index(i, k) : k;
            b[idx] += std::pow(r, pw) * (a * std::cos(j * th) + c * std::sin(j * th));
          }
        }
      }
    }
  }
  return project_constraints(s, p, g);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace wavehum::testing
