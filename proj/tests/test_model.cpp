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

#include <numbers>

#include "test_support.hpp"
#include "wavehum/model.hpp"

using namespace wavehum;
using namespace wavehum::testing;
constexpr double pi = std::numbers::pi;

namespace {

const AnnulusGrid& grid() {
  static const AnnulusGrid g = build_grid(0.5, 1.0, 9, 16);
  return g;
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_THROW(PhysicalParams(0, 1, 1, 0.1, 1, 1), ConfigError);
  EXPECT_THROW(PhysicalParams(1, -1, 1, 0.1, 1, 1), ConfigError);
  EXPECT_THROW(PhysicalParams(1, 1, 0, 0.1, 1, 1), ConfigError);
  EXPECT_THROW(PhysicalParams(1, 1, 1, 0.1, 0, 1), ConfigError);
  EXPECT_THROW(PhysicalParams(1, 1, 1, -0.1, 1, 1), ConfigError);
  EXPECT_THROW(PhysicalParams(1, 1, 1, 0.1, 1, -1), ConfigError);
  try {
    PhysicalParams(1, 1, 1, 0.1, 1, -1);
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "physics.k");
  }
  EXPECT_TRUE(PhysicalParams(1, 1, 1, 0, 1, 0).seminorm_warning());
  EXPECT_FALSE(PhysicalParams::canonical().seminorm_warning());
}

TEST(Params, WaveSpeedIsDerived) {
  const PhysicalParams p(1.3, 0.7, 1, 0.1, 1, 1);
  EXPECT_NEAR(p.c2() * p.kappa() * p.rho(), 1.0, 1e-15);
  EXPECT_NEAR(p.c() * p.c(), p.c2(), 1e-15);
}

TEST(InnerProduct, ZeroState) {
  const StateVector z(grid());
  EXPECT_EQ(inner_product(z, z, PhysicalParams::canonical(), grid()), 0.0);
}

TEST(InnerProduct, ConstantPotentialIsInvisible) {
  StateVector a(grid());
  a.u().setConstant(2.5);
  EXPECT_LE(std::abs(norm_sq(a, PhysicalParams::canonical(), grid())), 1e-20);
  EXPECT_EQ(norm_sq(project_constraints(a, PhysicalParams::canonical(), grid()),
                    PhysicalParams::canonical(), grid()),
            0.0);
}

TEST(InnerProduct, UnitMembraneDisplacement) {
  const PhysicalParams p(1, 1, 1, 0, 1, 1);
  StateVector a(grid());
  a.v().setOnes();
  // (a, a)_H = (k / rho) |Gamma1|, so the energy is half of it.
  const double ip = inner_product(a, a, p, grid());
  EXPECT_NEAR(ip, 2 * pi * grid().arc_radius(), 1e-13);
  EXPECT_LE(std::abs(ip - 2 * pi) / (2 * pi), grid().dr() * grid().dr());
  EXPECT_NEAR(energy(a, p, grid()).spring, pi * grid().arc_radius(), 1e-13);
}

TEST(InnerProduct, SymmetricBilinear) {
  std::mt19937_64 rng(1);
  const PhysicalParams p = PhysicalParams::canonical();
  for (int t = 0; t < 100; ++t) {
    const StateVector a = random_state(grid(), rng), b = random_state(grid(), rng);
    const double ab = inner_product(a, b, p, grid()), ba = inner_product(b, a, p, grid());
    const double scale = std::sqrt(norm_sq(a, p, grid()) * norm_sq(b, p, grid()));
    EXPECT_LE(std::abs(ab - ba), 1e-14 * scale);
    const StateVector c = random_state(grid(), rng);
    const double lin = inner_product(2.0 * a + c, b, p, grid());
    EXPECT_NEAR(lin, 2 * ab + inner_product(c, b, p, grid()), 1e-12 * scale * 3);
  }
}

TEST(InnerProduct, MetricMatrixAgrees) {
  std::mt19937_64 rng(2);
  const PhysicalParams p(1.2, 0.8, 0.9, 0.3, 0.7, 1.4);
  const SparseMatrix m = metric_matrix(p, grid());
  for (int t = 0; t < 10; ++t) {
    const StateVector a = random_state(grid(), rng), b = random_state(grid(), rng);
    const double ip = inner_product(a, b, p, grid());
    EXPECT_NEAR(a.data().dot(m * b.data()), ip, 1e-12 * (1 + std::abs(ip)) * 10);
  }
}

TEST(Energy, ZeroState) {
  const EnergyBreakdown e = energy(StateVector(grid()), PhysicalParams::canonical(), grid());
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(e.kinetic_interior + e.potential_interior + e.kinetic_boundary + e.membrane + e.spring,
            0.0);
}

TEST(Energy, MembraneVelocityOnly) {
  const PhysicalParams p = PhysicalParams::canonical();
  StateVector s(grid());
  s.vt().setOnes();
  const EnergyBreakdown e = energy(s, p, grid());
  EXPECT_NEAR(e.kinetic_boundary, pi * grid().arc_radius(), 1e-13);
  EXPECT_LE(std::abs(e.kinetic_boundary - pi) / pi, grid().dr() * grid().dr());
  EXPECT_EQ(e.kinetic_interior, 0.0);
  EXPECT_EQ(e.potential_interior, 0.0);
  EXPECT_EQ(e.membrane, 0.0);
  EXPECT_EQ(e.spring, 0.0);
}

TEST(Energy, HalfTheSquaredNorm) {
  std::mt19937_64 rng(3);
  const PhysicalParams p = PhysicalParams::canonical();
  for (int t = 0; t < 20; ++t) {
    const StateVector s = random_state(grid(), rng);
    const EnergyBreakdown e = energy(s, p, grid());
    EXPECT_LE(rel_diff(e.total, 0.5 * norm_sq(s, p, grid())), 1e-12);
    EXPECT_GE(e.kinetic_interior, 0);
    EXPECT_GE(e.potential_interior, 0);
    EXPECT_GE(e.kinetic_boundary, 0);
    EXPECT_GE(e.membrane, 0);
    EXPECT_GE(e.spring, 0);
    EXPECT_EQ(e.total,
              e.kinetic_interior + e.potential_interior + e.kinetic_boundary + e.membrane + e.spring);
  }
}

TEST(Energy, QuotientInvariance) {
  std::mt19937_64 rng(4);
  const PhysicalParams p = PhysicalParams::canonical();
  StateVector s = random_state(grid(), rng);
  const double e0 = energy(s, p, grid()).total;
  s.u().array() += 17.0;
  EXPECT_LE(rel_diff(energy(s, p, grid()).total, e0), 1e-12);
}

TEST(Hooke, ZeroState) {
  EXPECT_EQ(hooke_invariant(StateVector(grid()), PhysicalParams::canonical(), grid()), 0.0);
}

TEST(Hooke, UniformVelocity) {
  StateVector s(grid());
  s.ut().setOnes();
  const double h = hooke_invariant(s, PhysicalParams::canonical(), grid());
  EXPECT_LE(std::abs(h - 0.75 * pi) / (0.75 * pi), grid().dr() * grid().dr());
}

TEST(ProjectConstraints, Idempotent) {
  std::mt19937_64 rng(5);
  const PhysicalParams p = PhysicalParams::canonical();
  const StateVector once = project_constraints(random_state(grid(), rng), p, grid());
  const StateVector twice = project_constraints(once, p, grid());
  EXPECT_LE((once.data() - twice.data()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(std::abs(hooke_invariant(once, p, grid())), 1e-14);
  EXPECT_LE(std::abs(mean_interior(once.u(), grid())), 1e-12 * once.u().norm());
}

TEST(ProjectConstraints, ConstantPotential) {
  StateVector s(grid());
  s.u().setConstant(5.0);
  const StateVector out = project_constraints(s, PhysicalParams::canonical(), grid());
  EXPECT_LE(out.u().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProjectConstraints, UniformVelocityShift) {
  const PhysicalParams p(2.0, 0.5, 1, 0.1, 1, 1);
  StateVector s(grid());
  s.ut().setOnes();
  const double shift = hooke_invariant(s, p, grid()) / (p.rho() * grid().area());
  const StateVector out = project_constraints(s, p, grid());
  EXPECT_LE(out.ut().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(shift, 1.0, 1e-14);
  EXPECT_LE(std::abs(hooke_invariant(out, p, grid())), 1e-14);
}

TEST(Dissipativity, ZeroState) {
  EXPECT_EQ(dissipativity_residual(StateVector(grid()), PhysicalParams::canonical(), grid()), 0.0);
}

TEST(Dissipativity, SkewPartWhenMembraneAtRest) {
  std::mt19937_64 rng(6);
  const PhysicalParams p = PhysicalParams::canonical();
  StateVector s = smooth_state(grid(), p, rng);
  s.vt().setZero();
  const double skew = inner_product(apply_generator(s, p, grid()), s, p, grid());
  const double r = dissipativity_residual(s, p, grid());
  EXPECT_EQ(r, skew);
  EXPECT_LE(std::abs(r), 1e-12 * norm_sq(apply_generator(s, p, grid()), p, grid()));
}

TEST(Dissipativity, ExactForRandomStates) {
  std::mt19937_64 rng(7);
  const PhysicalParams p(1.3, 0.6, 0.8, 0.25, 1.1, 0.9);
  for (int t = 0; t < 20; ++t) {
    const StateVector smooth = smooth_state(grid(), p, rng);
    EXPECT_LE(std::abs(dissipativity_residual(smooth, p, grid())),
              1e-8 * norm_sq(smooth, p, grid()));
    for (const StateVector& s : {smooth, random_state(grid(), rng)}) {
      const StateVector as = apply_generator(s, p, grid());
      const double scale = std::sqrt(norm_sq(as, p, grid()) * norm_sq(s, p, grid()));
      EXPECT_LE(std::abs(dissipativity_residual(s, p, grid())), 1e-12 * scale);
    }
  }
}

TEST(Dissipativity, AdjointGenerator) {
  std::mt19937_64 rng(8);
  const PhysicalParams p(1.3, 0.6, 0.8, 0.25, 1.1, 0.9);
  for (int t = 0; t < 20; ++t) {
    const AdjointState z = random_state<AdjointState>(grid(), rng);
    const AdjointState az = apply_adjoint_generator(z, p, grid());
    const double scale = std::sqrt(norm_sq(az, p, grid()) * norm_sq(z, p, grid()));
    EXPECT_LE(std::abs(adjoint_dissipativity_residual(z, p, grid())), 1e-12 * scale);
  }
}

TEST(Dissipativity, AdjointPairing) {
  std::mt19937_64 rng(9);
  const PhysicalParams p(1.3, 0.6, 0.8, 0.25, 1.1, 0.9);
  for (int t = 0; t < 20; ++t) {
    const StateVector a = random_state(grid(), rng);
    const AdjointState b = random_state<AdjointState>(grid(), rng);
    const double lhs = inner_product(apply_generator(a, p, grid()), b, p, grid());
    const double rhs = inner_product(a, apply_adjoint_generator(b, p, grid()), p, grid());
    const double scale =
        std::sqrt(norm_sq(apply_generator(a, p, grid()), p, grid()) * norm_sq(b, p, grid())) +
        std::sqrt(norm_sq(a, p, grid()) * norm_sq(apply_adjoint_generator(b, p, grid()), p, grid()));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
  }
}

TEST(Model, GridMismatch) {
  const AnnulusGrid other = build_grid(0.5, 1.0, 5, 8);
  EXPECT_THROW(inner_product(StateVector(grid()), StateVector(other), PhysicalParams::canonical(),
                             grid()),
               DimensionError);
}
