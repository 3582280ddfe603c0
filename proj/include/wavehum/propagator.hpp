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

#include <memory>

#include <Eigen/SparseLU>

#include "wavehum/grid.hpp"
#include "wavehum/params.hpp"
#include "wavehum/state.hpp"

namespace wavehum {

/// Orientation of the skew coupling between the fluid and the membrane.
/// `reversed` is the backward system written in reversed time with the
/// velocity block negated, which turns it into a damped forward problem.
enum class Coupling { forward, reversed };

/// Implicit midpoint map for the second-order system
///   U' = V,   V' = K U + C V + F,
/// with U = (u, v), V = (u_t, v_t). Eliminating the configuration update
/// leaves one sparse solve for the new velocities:
///   (I - h^2/4 K - h/2 C) V1 = (I + h^2/4 K + h/2 C) V0 + h K U0 + h F,
///   U1 = U0 + h/2 (V0 + V1).
/// The matrix is factorised once; each solve is refined until its relative
/// residual is at most `solve_tolerance`.
class MidpointPropagator {
 public:
  static constexpr double solve_tolerance = 1e-11;
  static constexpr int max_refinements = 4;

  MidpointPropagator(const PhysicalParams& p, const AnnulusGrid& g, double dt,
                     Coupling coupling = Coupling::forward);

  double dt() const { return dt_; }
  const AnnulusGrid& grid() const { return grid_; }
  const PhysicalParams& params() const { return params_; }

  /// One step in place; a negative dt runs the inverse map. `source` is the step-averaged acceleration on the
  /// velocity block (length n_interior + n_boundary) or empty for none.
  void advance(PhaseVector& x, const Eigen::VectorXd& source = {}) const;

  /// Stiffness K and coupling C blocks, exposed for dense assembly in tests.
  const SparseMatrix& stiffness() const { return k_; }
  const SparseMatrix& coupling() const { return c_; }

 private:
  PhysicalParams params_;
  AnnulusGrid grid_;
  double dt_;
  SparseMatrix k_, c_, plus_;
  Eigen::SparseMatrix<double> minus_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

}  // namespace wavehum
