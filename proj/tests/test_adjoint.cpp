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

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "wavehum/adjoint.hpp"

using namespace wavehum;
using namespace wavehum::testing;

namespace {

const AnnulusGrid& grid() {
  static const AnnulusGrid g = build_grid(0.5, 1.0, 9, 16);
  return g;
}

ControlSignal random_control(const TimeGrid& tg, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  const double a = n01(rng), b = n01(rng), w = 1 + 2 * std::abs(n01(rng));
  const int j = static_cast<int>(rng() % 4);
  return ControlSignal::sample(
      [&](double t, double th) { return a * std::sin(w * t) * std::cos(j * th) + b * t; }, tg,
      grid());
}

}  // namespace

TEST(Backward, ZeroTerminal) {
  const AdjointSolution s =
      solve_backward(AdjointState(grid()), 1.0, 0.01, PhysicalParams::canonical(), grid());
  EXPECT_EQ(s.observation.obs_norm_sq, 0.0);
  EXPECT_EQ(s.trajectory.initial.data().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, EnergyGrowsTowardTerminalTime) {
  std::mt19937_64 rng(1);
  const PhysicalParams p = PhysicalParams::canonical();
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  const AdjointSolution s = solve_backward(zT, 3.0, 0.01, p, grid());
  const AdjointTrajectory& tr = s.trajectory;
  const double eT = tr.energy.back();
  ASSERT_EQ(tr.energy.size(), 301u);
  EXPECT_NEAR(eT, energy(zT, p, grid()).total, 1e-15 * eT);
  for (size_t n = 0; n < tr.energy.size(); ++n) {
    EXPECT_LE(tr.energy[n], eT);
    EXPECT_LE(std::abs(tr.residual[n]), 1e-9 * eT);
    if (n > 0) EXPECT_LE(tr.energy[n - 1], tr.energy[n]);
  }
  EXPECT_LT(tr.energy.front(), 0.99 * eT);
}

TEST(Backward, HookeLinkConserved) {
  std::mt19937_64 rng(2);
  const PhysicalParams p = PhysicalParams::canonical();
  AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  zT.phit().array() += 0.3;
  const AdjointSolution s = solve_backward(zT, 2.0, 0.01, p, grid(), 1);
  const double h0 = hooke_invariant(zT, p, grid());
  for (const AdjointState& z : s.trajectory.states)
    EXPECT_LE(std::abs(hooke_invariant(z, p, grid()) - h0), 1e-10 * (1 + std::abs(h0)));
}

TEST(Backward, AccelerationFromMembraneEquation) {
  std::mt19937_64 rng(3);
  const PhysicalParams p = PhysicalParams::canonical();
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  const TimeGrid tg = TimeGrid::make(2.0, 0.01);
  const AdjointSolver as(p, grid(), tg.dt);
  const ObservationRecord obs = as.observe(zT, tg.n_steps);
  const double scale = obs.deltatt_mid.cwiseAbs().maxCoeff();
  for (int n = 0; n < tg.n_steps; ++n) {
    const Eigen::RowVectorXd diff = (obs.deltat.row(n + 1) - obs.deltat.row(n)) / tg.dt;
    EXPECT_LE((diff - obs.deltatt_mid.row(n)).cwiseAbs().maxCoeff(), 1e-9 * scale);
  }
  for (int k = 1; k < tg.n_steps; ++k) {
    const Eigen::RowVectorXd diff = (obs.deltat_mid.row(k) - obs.deltat_mid.row(k - 1)) / tg.dt;
    EXPECT_LE((diff - obs.deltatt.row(k)).cwiseAbs().maxCoeff(), 1e-9 * scale);
  }
}

TEST(Backward, AccelerationMatchesSecondDifference) {
  // The midpoint map makes the centred second difference of delta equal to
  // the node acceleration, so only round-off separates them.
  std::mt19937_64 rng(4);
  const PhysicalParams p = PhysicalParams::canonical();
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  for (double dt : {0.02, 0.01}) {
    const AdjointSolution s = solve_backward(zT, 1.0, dt, p, grid(), 1);
    const auto& st = s.trajectory.states;
    const double scale = s.observation.deltatt.cwiseAbs().maxCoeff();
    for (size_t k = 1; k + 1 < st.size(); ++k) {
      const BoundaryField d2 = (st[k + 1].delta() - 2 * st[k].delta() + st[k - 1].delta()) / (dt * dt);
      EXPECT_LE((d2.transpose() - s.observation.deltatt.row(k)).cwiseAbs().maxCoeff(), 1e-7 * scale);
    }
  }
}

TEST(Duality, RandomPairs) {
  std::mt19937_64 rng(5);
  const PhysicalParams p(1.2, 0.8, 0.9, 0.2, 0.7, 1.1);
  const double T = 1.5, dt = 0.01;
  const TimeGrid tg = TimeGrid::make(T, dt);
  for (int trial = 0; trial < 20; ++trial) {
    const ControlSignal f = random_control(tg, rng);
    const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
    const DualityReport r = duality_residual(f, zT, T, dt, p, grid());
    EXPECT_LE(r.relative_residual, 1e-8) << r.forward_side << " " << r.adjoint_side;
    EXPECT_GT(std::abs(r.forward_side), 0.0);
  }
}

TEST(Duality, ZeroControlAndScaling) {
  std::mt19937_64 rng(6);
  const PhysicalParams p = PhysicalParams::canonical();
  const TimeGrid tg = TimeGrid::make(1.0, 0.01);
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  const DualityReport z = duality_residual(ControlSignal(tg.n_steps, 16, tg.dt), zT, 1.0, 0.01, p, grid());
  EXPECT_EQ(z.forward_side, 0.0);
  EXPECT_EQ(z.adjoint_side, 0.0);
  const ControlSignal f = random_control(tg, rng);
  const DualityReport a = duality_residual(f, zT, 1.0, 0.01, p, grid());
  const DualityReport b = duality_residual(2.0 * f, zT, 1.0, 0.01, p, grid());
  EXPECT_DOUBLE_EQ(b.adjoint_side, 2 * a.adjoint_side);
  EXPECT_NEAR(b.forward_side, 2 * a.forward_side, 1e-13 * std::abs(a.forward_side));
}

TEST(Observation, NormAndCsvAgree) {
  std::mt19937_64 rng(7);
  const PhysicalParams p = PhysicalParams::canonical();
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  const AdjointSolution s = solve_backward(zT, 0.5, 0.01, p, grid());
  const ObservationRecord& obs = s.observation;
  EXPECT_GT(obs.obs_norm_sq, 0);
  EXPECT_DOUBLE_EQ(obs.obs_norm_sq, observation_norm_sq(obs));
  Eigen::VectorXd half = Eigen::VectorXd::Constant(obs.n_steps() + 1, 0.5);
  EXPECT_LT(observation_norm_sq(obs, half), obs.obs_norm_sq);
  std::ostringstream os;
  write_observation_csv(os, obs);
  const std::string out = os.str();
  EXPECT_EQ(out.substr(0, out.find('\n')), "t,deltat_sq,deltatt_sq,cumulative");
  const std::string last = out.substr(out.rfind('\n', out.size() - 2) + 1);
  const double cum = std::stod(last.substr(last.rfind(',') + 1));
  EXPECT_NEAR(cum, obs.obs_norm_sq, 1e-12 * obs.obs_norm_sq);
  EXPECT_THROW(observation_norm_sq(obs, Eigen::VectorXd::Ones(3)), DimensionError);
}

TEST(Observation, DecimatedStatesIncludeEnds) {
  std::mt19937_64 rng(8);
  const PhysicalParams p = PhysicalParams::canonical();
  const AdjointState zT = smooth_state<AdjointState>(grid(), p, rng);
  const AdjointSolution s = solve_backward(zT, 0.25, 0.01, p, grid(), 10);
  EXPECT_EQ(s.trajectory.recorded_steps, (std::vector<int>{0, 10, 20, 25}));
  EXPECT_EQ(s.trajectory.states.back().data(), zT.data());
}
