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

#include "wavehum/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wavehum/io.hpp"

namespace wavehum {

namespace {

double node_weight(const Eigen::VectorXd& chi, int k) {
  return chi.size() ? chi[k] : 1.0;
}

void check_weights(const ObservationRecord& obs, const Eigen::VectorXd& chi) {
  if (chi.size() != 0 && chi.size() != obs.n_steps() + 1)
    throw DimensionError("observation weights must have N + 1 entries");
}

void flip_velocity(PhaseVector& x) { x.velocity() = -x.velocity(); }

}  // namespace

double observation_pairing(const ObservationRecord& a,
                           const ObservationRecord& b,
                           const Eigen::VectorXd& chi) {
  if (a.deltat.rows() != b.deltat.rows() || a.deltat.cols() != b.deltat.cols())
    throw DimensionError("observations on different grids");
  check_weights(a, chi);
  const int n = a.n_steps();
  double vel = 0, acc = 0;
  for (int i = 0; i < n; ++i) vel += a.deltat_mid.row(i).dot(b.deltat_mid.row(i));
  for (int k = 1; k < n; ++k)
    acc += node_weight(chi, k) * a.deltatt.row(k).dot(b.deltatt.row(k));
  return a.dt * a.arc_weight * (vel + acc);
}

double observation_norm_sq(const ObservationRecord& obs,
                           const Eigen::VectorXd& chi) {
  return observation_pairing(obs, obs, chi);
}

AdjointSolver::AdjointSolver(const PhysicalParams& p, const AnnulusGrid& g,
                             double dt)
    : prop_(p, g, dt, Coupling::reversed) {
  if (!(dt > 0)) throw ConfigError("time step must be > 0", "horizon.dt");
}

template <class Visit>
void AdjointSolver::run(const AdjointState& terminal, int n_steps,
                        Visit&& visit) const {
  const AnnulusGrid& g = grid();
  if (!terminal.matches(g)) throw DimensionError("terminal data on another grid");
  if (n_steps < 1) throw ConfigError("at least one step is required");
  // Reversed time with negated velocities; see Coupling::reversed.
  AdjointState x = terminal, prev = terminal;
  flip_velocity(x);
  visit(n_steps, terminal, static_cast<const AdjointState*>(nullptr));
  for (int n = n_steps - 1; n >= 0; --n) {
    prop_.advance(x);
    AdjointState z = x;
    flip_velocity(z);
    visit(n, z, &prev);
    prev = std::move(z);
  }
}

ObservationRecord AdjointSolver::observe(const AdjointState& terminal,
                                         int n_steps,
                                         AdjointState* initial) const {
  const AnnulusGrid& g = grid();
  const PhysicalParams& p = params();
  const int nb = g.n_boundary();
  ObservationRecord obs;
  obs.dt = dt();
  obs.arc_weight = g.arc_weight();
  obs.deltat.resize(n_steps + 1, nb);
  obs.deltat_mid.resize(n_steps, nb);
  obs.deltatt.resize(n_steps + 1, nb);
  obs.deltatt_mid.resize(n_steps, nb);

  run(terminal, n_steps, [&](int n, const AdjointState& z, const AdjointState* next) {
    obs.deltat.row(n) = z.deltat().transpose();
    if (next) {
      const AdjointState mid = 0.5 * (z + *next);
      obs.deltat_mid.row(n) = mid.deltat().transpose();
      obs.deltatt_mid.row(n) = adjoint_membrane_acceleration(mid, p, g).transpose();
    }
    if (n == 0 || n == n_steps)
      obs.deltatt.row(n) = adjoint_membrane_acceleration(z, p, g).transpose();
    if (n == 0 && initial) *initial = z;
  });
  for (int k = 1; k < n_steps; ++k)
    obs.deltatt.row(k) = 0.5 * (obs.deltatt_mid.row(k - 1) + obs.deltatt_mid.row(k));
  obs.obs_norm_sq = observation_norm_sq(obs);
  return obs;
}

AdjointSolution AdjointSolver::solve(const AdjointState& terminal, int n_steps,
                                     int decimation) const {
  const AnnulusGrid& g = grid();
  const PhysicalParams& p = params();
  decimation = std::max(decimation, 1);
  AdjointSolution sol;
  AdjointTrajectory& tr = sol.trajectory;
  tr.times.resize(n_steps + 1);
  tr.energy.resize(n_steps + 1);
  tr.dissipated.resize(n_steps + 1);
  tr.residual.resize(n_steps + 1);
  std::vector<std::pair<int, AdjointState>> kept;

  const double h = dt();
  double dissipated = 0, e_final = 0;
  run(terminal, n_steps, [&](int n, const AdjointState& z, const AdjointState* next) {
    const double e = energy(z, p, g).total;
    if (!next) e_final = e;
    if (next) {
      const Eigen::VectorXd dbar = 0.5 * (z.deltat() + next->deltat());
      dissipated += h * (p.d() / p.rho()) * g.arc_weight() * dbar.squaredNorm();
    }
    tr.times[n] = n * h;
    tr.energy[n] = e;
    tr.dissipated[n] = dissipated;
    tr.residual[n] = e_final - e - dissipated;
    if (n % decimation == 0 || n == n_steps) kept.emplace_back(n, z);
  });
  std::reverse(kept.begin(), kept.end());
  for (auto& [n, z] : kept) {
    tr.recorded_steps.push_back(n);
    tr.states.push_back(std::move(z));
  }
  tr.initial = tr.states.front();
  sol.observation = observe(terminal, n_steps);
  return sol;
}

AdjointSolution solve_backward(const AdjointState& terminal, double T,
                               double dt, const PhysicalParams& p,
                               const AnnulusGrid& g, int decimation) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  return AdjointSolver(p, g, tg.dt).solve(terminal, tg.n_steps, decimation);
}

double control_pairing(const ControlSignal& f, const ObservationRecord& obs,
                       const PhysicalParams& p) {
  if (f.n_steps() != obs.n_steps() || f.n_boundary() != obs.deltat.cols())
    throw DimensionError("control and observation on different grids");
  const double s = (f.values().array() * obs.deltat_mid.array()).sum();
  return -obs.dt * obs.arc_weight * s / p.rho();
}

DualityReport duality_residual(const ControlSignal& control,
                               const AdjointState& terminal, double T,
                               double dt, const PhysicalParams& p,
                               const AnnulusGrid& g) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  if (control.n_steps() != tg.n_steps)
    throw DimensionError("control does not cover the step grid of [0, T]");
  const ForwardSolver fs(p, g, tg.dt);
  const AdjointSolver as(p, g, tg.dt);
  const StateVector xT = fs.terminal(StateVector(g), control, tg.n_steps);
  DualityReport rep;
  rep.forward_side = inner_product(xT, terminal, p, g);
  rep.adjoint_side = control_pairing(control, as.observe(terminal, tg.n_steps), p);
  const double scale = std::max(std::abs(rep.forward_side), std::abs(rep.adjoint_side));
  rep.relative_residual =
      scale > 0 ? std::abs(rep.forward_side - rep.adjoint_side) / scale : 0.0;
  return rep;
}

void write_observation_csv(std::ostream& os, const ObservationRecord& obs,
                           const Eigen::VectorXd& chi) {
  check_weights(obs, chi);
  CsvWriter csv(os, {"t", "deltat_sq", "deltatt_sq", "cumulative"});
  const int n = obs.n_steps();
  const double h = obs.dt, beta = obs.arc_weight;
  double cumulative = 0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) cumulative += h * beta * obs.deltat_mid.row(k - 1).squaredNorm();
    if (k > 0 && k < n)
      cumulative += h * beta * node_weight(chi, k) * obs.deltatt.row(k).squaredNorm();
    csv.row({k * h, beta * obs.deltat.row(k).squaredNorm(),
             beta * obs.deltatt.row(k).squaredNorm(), cumulative});
  }
}

}  // namespace wavehum
