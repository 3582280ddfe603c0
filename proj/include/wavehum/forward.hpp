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

#include <functional>
#include <iosfwd>
#include <vector>

#include "wavehum/model.hpp"
#include "wavehum/propagator.hpp"

namespace wavehum {

/// Uniform step grid on [0, T]. The step count is ceil(T / dt) and the step
/// is shrunk to T / n_steps so the last node lands on T.
struct TimeGrid {
  int n_steps = 0;
  double dt = 0;

  static TimeGrid make(double T, double dt);
  double T() const { return n_steps * dt; }
  double time(int n) const { return n * dt; }
  double midpoint(int n) const { return (n + 0.5) * dt; }
};

/// Boundary force on Gamma1, one value per node and per step interval. The
/// value of interval n is the force averaged over [t_n, t_n+1].
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(int n_steps, int n_boundary, double dt);
  ControlSignal(Eigen::MatrixXd interval_values, double dt);

  /// From node samples f(t_n, theta_j), n = 0..N, by the trapezoid average.
  static ControlSignal from_nodal(const Eigen::MatrixXd& nodal, double dt);
  /// Samples f at interval midpoints.
  static ControlSignal sample(const std::function<double(double, double)>& f,
                              const TimeGrid& tg, const AnnulusGrid& g);

  bool empty() const { return values_.size() == 0; }
  int n_steps() const { return static_cast<int>(values_.rows()); }
  int n_boundary() const { return static_cast<int>(values_.cols()); }
  double dt() const { return dt_; }
  double T() const { return n_steps() * dt_; }

  Eigen::MatrixXd& values() { return values_; }
  const Eigen::MatrixXd& values() const { return values_; }
  BoundaryField interval(int n) const { return values_.row(n).transpose(); }

  ControlSignal& operator+=(const ControlSignal& o);
  ControlSignal& operator*=(double s);

 private:
  Eigen::MatrixXd values_;
  double dt_ = 0;
};

ControlSignal operator+(ControlSignal a, const ControlSignal& b);
ControlSignal operator*(double s, ControlSignal a);

struct Trajectory {
  std::vector<double> times;          // t_0 .. t_N
  std::vector<int> recorded_steps;    // step index of each stored state
  std::vector<StateVector> states;    // decimated; always holds t_0 and t_N
  Eigen::MatrixXd boundary_vt;        // (N + 1) x Ntheta
  Eigen::MatrixXd boundary_vtt;       // N x Ntheta, (v_t(n+1) - v_t(n)) / dt
  StateVector final_state;
};

struct EnergyLedger {
  std::vector<double> energy;
  std::vector<double> dissipated;
  std::vector<double> work_in;
  std::vector<double> residual;
  std::vector<double> hooke;

  double max_abs_residual() const;
  double max_hooke_drift() const;
};

struct SimulationResult {
  Trajectory trajectory;
  EnergyLedger ledger;
};

/// Step-averaged acceleration on the velocity block; return an empty vector
/// for an unforced step.
using SourceFn = std::function<Eigen::VectorXd(int step)>;

/// Forward solver with a cached midpoint factorisation for one (p, g, dt).
class ForwardSolver {
 public:
  ForwardSolver(const PhysicalParams& p, const AnnulusGrid& g, double dt);

  const MidpointPropagator& propagator() const { return prop_; }
  double dt() const { return prop_.dt(); }

  /// One step with the interval-averaged force f_avg (empty for none).
  StateVector step(const StateVector& s, const BoundaryField& f_avg) const;

  /// n_steps = control.n_steps(), or `n_steps` when the control is empty.
  SimulationResult simulate(const StateVector& s0, const ControlSignal& control,
                            int n_steps, int decimation = 10) const;
  SimulationResult simulate_with_source(const StateVector& s0, int n_steps,
                                        const SourceFn& source,
                                        int decimation = 10) const;

  /// Terminal state only, without recording anything.
  StateVector terminal(const StateVector& s0, const ControlSignal& control,
                       int n_steps) const;

  /// Velocity-block source produced by a boundary force: -f / m on v_t.
  Eigen::VectorXd control_source(const BoundaryField& f_avg) const;

 private:
  MidpointPropagator prop_;
};

/// Single step with f averaged from its end values. Factorises on every
/// call; use ForwardSolver for repeated steps.
StateVector step(const StateVector& s, const BoundaryField& f_now,
                 const BoundaryField& f_next, double dt,
                 const PhysicalParams& p, const AnnulusGrid& g);

SimulationResult simulate(const StateVector& s0, const ControlSignal& control,
                          double T, double dt, const PhysicalParams& p,
                          const AnnulusGrid& g, int decimation = 10);

/// Terminal state of simulate(); a target that is reachable by construction.
StateVector reachable_target(const StateVector& s0, const ControlSignal& probe,
                             double T, double dt, const PhysicalParams& p,
                             const AnnulusGrid& g);

/// CSV with columns t,E,dissipated,work_in,residual,hooke.
void write_ledger_csv(std::ostream& os, const Trajectory& traj,
                      const EnergyLedger& ledger);

}  // namespace wavehum
