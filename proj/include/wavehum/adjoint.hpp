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

#include <iosfwd>
#include <vector>

#include "wavehum/forward.hpp"

namespace wavehum {

struct AdjointTrajectory {
  std::vector<double> times;          // t_0 .. t_N
  std::vector<int> recorded_steps;
  std::vector<AdjointState> states;   // decimated; always holds t_0 and t_N
  AdjointState initial;               // state at t = 0
  std::vector<double> energy;         // E(t_n)
  std::vector<double> dissipated;     // (d / rho) int_{t_n}^T |delta_t|^2
  std::vector<double> residual;       // E(T) - E(t_n) - dissipated
};

/// Boundary observation of a backward run. delta_t is recorded at the step
/// nodes and as interval averages; delta_tt is evaluated from the membrane
/// equation, on intervals at the midpoint state and at nodes from the
/// averaged state of the two adjacent intervals (endpoints use the node).
struct ObservationRecord {
  double dt = 0;
  double arc_weight = 0;
  Eigen::MatrixXd deltat;       // (N + 1) x Ntheta
  Eigen::MatrixXd deltat_mid;   // N x Ntheta
  Eigen::MatrixXd deltatt;      // (N + 1) x Ntheta
  Eigen::MatrixXd deltatt_mid;  // N x Ntheta
  double obs_norm_sq = 0;       // plain weighting

  int n_steps() const { return static_cast<int>(deltat_mid.rows()); }
};

/// Discrete int_0^T |delta_t|^2 + chi |delta_tt|^2 dt: midpoint rule on the
/// interval averages plus interior-node rule for the acceleration. `chi`
/// holds N + 1 node weights (empty means chi = 1).
double observation_norm_sq(const ObservationRecord& obs,
                           const Eigen::VectorXd& chi = {});
/// Bilinear version of observation_norm_sq.
double observation_pairing(const ObservationRecord& a,
                           const ObservationRecord& b,
                           const Eigen::VectorXd& chi = {});

struct AdjointSolution {
  AdjointTrajectory trajectory;
  ObservationRecord observation;
};

/// Backward solver with a cached factorisation for one (p, g, dt).
class AdjointSolver {
 public:
  AdjointSolver(const PhysicalParams& p, const AnnulusGrid& g, double dt);

  double dt() const { return prop_.dt(); }
  const PhysicalParams& params() const { return prop_.params(); }
  const AnnulusGrid& grid() const { return prop_.grid(); }

  /// Integrates from t = n_steps * dt down to 0.
  AdjointSolution solve(const AdjointState& terminal, int n_steps,
                        int decimation = 10) const;
  /// Observation and the state at t = 0 only.
  ObservationRecord observe(const AdjointState& terminal, int n_steps,
                            AdjointState* initial = nullptr) const;

 private:
  template <class Visit>
  void run(const AdjointState& terminal, int n_steps, Visit&& visit) const;

  MidpointPropagator prop_;
};

AdjointSolution solve_backward(const AdjointState& terminal, double T,
                               double dt, const PhysicalParams& p,
                               const AnnulusGrid& g, int decimation = 10);

/// Forward side (F_T f, z)_H and observation side
/// -(1/rho) int_0^T int_Gamma1 f delta_t of the duality identity.
struct DualityReport {
  double forward_side = 0;
  double adjoint_side = 0;
  double relative_residual = 0;
};

DualityReport duality_residual(const ControlSignal& control,
                               const AdjointState& terminal, double T,
                               double dt, const PhysicalParams& p,
                               const AnnulusGrid& g);

/// -(1/rho) sum_n dt sum_j beta f_n,j y_n,j with y the interval-averaged
/// delta_t; this is how a boundary force pairs with the adjoint.
double control_pairing(const ControlSignal& f, const ObservationRecord& obs,
                       const PhysicalParams& p);

/// CSV with columns t,deltat_sq,deltatt_sq,cumulative.
void write_observation_csv(std::ostream& os, const ObservationRecord& obs,
                           const Eigen::VectorXd& chi = {});

}  // namespace wavehum
