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

#include "wavehum/forward.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wavehum/io.hpp"

namespace wavehum {

TimeGrid TimeGrid::make(double T, double dt) {
  if (!(T > 0)) throw ConfigError("horizon must be > 0", "horizon.T");
  if (!(dt > 0)) throw ConfigError("time step must be > 0", "horizon.dt");
  TimeGrid tg;
  tg.n_steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  tg.dt = T / tg.n_steps;
  return tg;
}

ControlSignal::ControlSignal(int n_steps, int n_boundary, double dt)
    : values_(Eigen::MatrixXd::Zero(n_steps, n_boundary)), dt_(dt) {}

ControlSignal::ControlSignal(Eigen::MatrixXd interval_values, double dt)
    : values_(std::move(interval_values)), dt_(dt) {}

ControlSignal ControlSignal::from_nodal(const Eigen::MatrixXd& nodal,
                                        double dt) {
  if (nodal.rows() < 2)
    throw DimensionError("nodal control needs at least two time samples");
  const Eigen::Index n = nodal.rows() - 1;
  return ControlSignal(0.5 * (nodal.topRows(n) + nodal.bottomRows(n)), dt);
}

ControlSignal ControlSignal::sample(
    const std::function<double(double, double)>& f, const TimeGrid& tg,
    const AnnulusGrid& g) {
  ControlSignal c(tg.n_steps, g.n_boundary(), tg.dt);
  for (int n = 0; n < tg.n_steps; ++n)
    for (int j = 0; j < g.n_boundary(); ++j)
      c.values_(n, j) = f(tg.midpoint(n), g.theta(j));
  return c;
}

ControlSignal& ControlSignal::operator+=(const ControlSignal& o) {
  if (o.values_.rows() != values_.rows() || o.values_.cols() != values_.cols())
    throw DimensionError("controls on different step grids");
  values_ += o.values_;
  return *this;
}

ControlSignal& ControlSignal::operator*=(double s) {
  values_ *= s;
  return *this;
}

ControlSignal operator+(ControlSignal a, const ControlSignal& b) {
  a += b;
  return a;
}

ControlSignal operator*(double s, ControlSignal a) {
  a *= s;
  return a;
}

double EnergyLedger::max_abs_residual() const {
  double m = 0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double EnergyLedger::max_hooke_drift() const {
  double m = 0;
  for (double h : hooke) m = std::max(m, std::abs(h - hooke.front()));
  return m;
}

ForwardSolver::ForwardSolver(const PhysicalParams& p, const AnnulusGrid& g,
                             double dt)
    : prop_(p, g, dt, Coupling::forward) {}

Eigen::VectorXd ForwardSolver::control_source(const BoundaryField& f_avg) const {
  const AnnulusGrid& g = prop_.grid();
  if (f_avg.size() != g.n_boundary())
    throw DimensionError("control field length differs from Ntheta");
  Eigen::VectorXd src = Eigen::VectorXd::Zero(g.n_interior() + g.n_boundary());
  src.tail(g.n_boundary()) = -f_avg / prop_.params().m();
  return src;
}

StateVector ForwardSolver::step(const StateVector& s,
                                const BoundaryField& f_avg) const {
  StateVector out = s;
  if (f_avg.size() == 0)
    prop_.advance(out);
  else
    prop_.advance(out, control_source(f_avg));
  return out;
}

SimulationResult ForwardSolver::simulate(const StateVector& s0,
                                         const ControlSignal& control,
                                         int n_steps, int decimation) const {
  if (control.empty())
    return simulate_with_source(s0, n_steps, {}, decimation);
  if (control.n_boundary() != prop_.grid().n_boundary())
    throw DimensionError("control field length differs from Ntheta");
  return simulate_with_source(
      s0, control.n_steps(),
      [&](int n) { return control_source(control.interval(n)); }, decimation);
}

SimulationResult ForwardSolver::simulate_with_source(const StateVector& s0,
                                                     int n_steps,
                                                     const SourceFn& source,
                                                     int decimation) const {
  const AnnulusGrid& g = prop_.grid();
  const PhysicalParams& p = prop_.params();
  if (!s0.matches(g)) throw DimensionError("initial state on another grid");
  if (n_steps < 1) throw ConfigError("at least one step is required");
  decimation = std::max(decimation, 1);
  const double h = prop_.dt();
  const double beta = g.arc_weight();
  const auto& w = g.cell_weights();
  const int ni = g.n_interior(), nb = g.n_boundary();

  SimulationResult res;
  Trajectory& tr = res.trajectory;
  EnergyLedger& lg = res.ledger;
  tr.times.reserve(n_steps + 1);
  tr.boundary_vt.resize(n_steps + 1, nb);
  tr.boundary_vtt.resize(n_steps, nb);
  for (auto* v : {&lg.energy, &lg.dissipated, &lg.work_in, &lg.residual,
                  &lg.hooke})
    v->reserve(n_steps + 1);

  StateVector x = s0;
  const double e0 = energy(x, p, g).total;
  double dissipated = 0, work = 0;
  auto record = [&](int n) {
    tr.times.push_back(n * h);
    tr.boundary_vt.row(n) = x.vt().transpose();
    const double e = energy(x, p, g).total;
    lg.energy.push_back(e);
    lg.dissipated.push_back(dissipated);
    lg.work_in.push_back(work);
    lg.residual.push_back(e - e0 + dissipated - work);
    lg.hooke.push_back(hooke_invariant(x, p, g));
    if (n % decimation == 0 || n == n_steps) {
      tr.recorded_steps.push_back(n);
      tr.states.push_back(x);
    }
  };

  record(0);
  for (int n = 0; n < n_steps; ++n) {
    const Eigen::VectorXd src = source ? source(n) : Eigen::VectorXd();
    const Eigen::VectorXd v_old = x.velocity();
    prop_.advance(x, src);
    const Eigen::VectorXd vbar = 0.5 * (v_old + x.velocity());
    dissipated += h * (p.d() / p.rho()) * beta * vbar.tail(nb).squaredNorm();
    if (src.size() != 0) {
      work += h * ((w.array() * vbar.head(ni).array() * src.head(ni).array())
                           .sum() /
                       p.c2() +
                   (p.m() / p.rho()) * beta * vbar.tail(nb).dot(src.tail(nb)));
    }
    tr.boundary_vtt.row(n) =
        (x.vt() - v_old.tail(nb)).transpose() / h;
    record(n + 1);
  }
  tr.final_state = x;
  return res;
}

StateVector ForwardSolver::terminal(const StateVector& s0,
                                    const ControlSignal& control,
                                    int n_steps) const {
  if (!s0.matches(prop_.grid()))
    throw DimensionError("initial state on another grid");
  StateVector x = s0;
  const int steps = control.empty() ? n_steps : control.n_steps();
  for (int n = 0; n < steps; ++n) {
    if (control.empty())
      prop_.advance(x);
    else
      prop_.advance(x, control_source(control.interval(n)));
  }
  return x;
}

StateVector step(const StateVector& s, const BoundaryField& f_now,
                 const BoundaryField& f_next, double dt,
                 const PhysicalParams& p, const AnnulusGrid& g) {
  ForwardSolver fs(p, g, dt);
  return fs.step(s, 0.5 * (f_now + f_next));
}

SimulationResult simulate(const StateVector& s0, const ControlSignal& control,
                          double T, double dt, const PhysicalParams& p,
                          const AnnulusGrid& g, int decimation) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  if (!control.empty() && control.n_steps() != tg.n_steps)
    throw DimensionError("control does not cover the step grid of [0, T]");
  ForwardSolver fs(p, g, tg.dt);
  return fs.simulate(s0, control, tg.n_steps, decimation);
}

StateVector reachable_target(const StateVector& s0, const ControlSignal& probe,
                             double T, double dt, const PhysicalParams& p,
                             const AnnulusGrid& g) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  if (!probe.empty() && probe.n_steps() != tg.n_steps)
    throw DimensionError("probe does not cover the step grid of [0, T]");
  ForwardSolver fs(p, g, tg.dt);
  return fs.terminal(s0, probe, tg.n_steps);
}

void write_ledger_csv(std::ostream& os, const Trajectory& traj,
                      const EnergyLedger& ledger) {
  CsvWriter csv(os, {"t", "E", "dissipated", "work_in", "residual", "hooke"});
  for (size_t n = 0; n < traj.times.size(); ++n)
    csv.row({traj.times[n], ledger.energy[n], ledger.dissipated[n],
             ledger.work_in[n], ledger.residual[n], ledger.hooke[n]});
}

}  // namespace wavehum
