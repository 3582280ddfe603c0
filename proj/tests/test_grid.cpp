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

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "wavehum/grid.hpp"

using namespace wavehum;
using wavehum::testing::uniform_vector;
constexpr double pi = std::numbers::pi;

namespace {

InteriorField sample(const AnnulusGrid& g, auto&& f) {
  InteriorField u(g.n_interior());
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.ntheta(); ++j)
      u[g.index(i, j)] = f(g.radius(i), g.theta(j));
  return u;
}

BoundaryField sample_boundary(const AnnulusGrid& g, auto&& f) {
  BoundaryField v(g.n_boundary());
  for (int j = 0; j < g.ntheta(); ++j) v[j] = f(g.theta(j));
  return v;
}

}  // namespace

TEST(Grid, Spacings) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 8);
  EXPECT_DOUBLE_EQ(g.dr(), 0.125);
  EXPECT_DOUBLE_EQ(g.dtheta(), pi / 4);
  EXPECT_EQ(g.n_interior(), 40);
  EXPECT_DOUBLE_EQ(g.radius(4), 1.0);
}

TEST(Grid, RejectsBadDimensions) {
  EXPECT_THROW(build_grid(1.0, 0.5, 5, 8), ConfigError);
  EXPECT_THROW(build_grid(0.0, 1.0, 5, 8), ConfigError);
  EXPECT_THROW(build_grid(0.5, 1.0, 3, 8), ConfigError);
  EXPECT_THROW(build_grid(0.5, 1.0, 5, 7), ConfigError);
  EXPECT_THROW(build_grid(0.5, 1.0, 5, 6), ConfigError);
  try {
    build_grid(1.0, 0.5, 5, 8);
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "geometry.r1");
  }
}

TEST(Grid, AreaQuadrature) {
  for (int nr : {5, 9, 17}) {
    const AnnulusGrid g = build_grid(0.5, 1.0, nr, 16);
    const double area = pi * (1.0 - 0.25);
    const double q = quadrature_interior(InteriorField::Ones(g.n_interior()), g);
    EXPECT_LE(std::abs(q - area) / area, g.dr() * g.dr());
    // The closure weights integrate r exactly.
    EXPECT_NEAR(q, area, 1e-13);
  }
}

TEST(Grid, BoundaryQuadrature) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 9, 16);
  const double q = quadrature_boundary(BoundaryField::Ones(16), g);
  EXPECT_DOUBLE_EQ(q, g.perimeter());
  EXPECT_DOUBLE_EQ(q, 2 * pi * g.arc_radius());
  EXPECT_LE(std::abs(q - 2 * pi) / (2 * pi), 0.25 * g.dr() * g.dr());
}

TEST(Grid, TraceOfRadialField) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 7, 12);
  const auto u = sample(g, [](double r, double) { return std::exp(r); });
  const BoundaryField t = trace_gamma1(u, g);
  for (int j = 0; j < 12; ++j) EXPECT_DOUBLE_EQ(t[j], std::exp(1.0));
}

TEST(Laplacian, ConstantIsAnnihilated) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 6, 12);
  const InteriorField l = laplacian(InteriorField::Constant(g.n_interior(), 3.7),
                                    BoundaryField::Zero(12), g);
  EXPECT_EQ(l.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Laplacian, RadiusSquared) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 9, 16);
  const auto u = sample(g, [](double r, double) { return r * r; });
  const InteriorField l =
      laplacian(u, BoundaryField::Constant(16, 2 * g.r1()), g,
                BoundaryField::Constant(16, -2 * g.r0()));
  // Second differences and centred first differences are exact on r^2.
  EXPECT_LE((l.array() - 4.0).abs().maxCoeff(), 1e-10);
}

TEST(Laplacian, HarmonicQuadratic) {
  for (int n : {8, 16, 32}) {
    const AnnulusGrid g = build_grid(0.5, 1.0, n + 1, 2 * n);
    const auto u = sample(g, [](double r, double t) { return r * r * std::cos(2 * t); });
    const auto fo = sample_boundary(g, [&](double t) { return 2 * g.r1() * std::cos(2 * t); });
    const auto fi = sample_boundary(g, [&](double t) { return -2 * g.r0() * std::cos(2 * t); });
    const InteriorField l = laplacian(u, fo, g, fi);
    // Only the angular symbol differs from the continuum value -4.
    const double dth = g.dtheta();
    const double sym = 4.0 - (2 - 2 * std::cos(2 * dth)) / (dth * dth);
    const auto expect = sample(g, [&](double, double t) { return sym * std::cos(2 * t); });
    EXPECT_LE((l - expect).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(l.cwiseAbs().maxCoeff(), 0.5 * dth * dth * 4.0);
  }
}

TEST(Laplacian, SecondOrderOnInteriorRows) {
  auto err = [](int n, bool closure_rows) {
    const AnnulusGrid g = build_grid(0.5, 1.0, n + 1, 4 * n);
    auto f = [](double r, double t) { return std::exp(r) * std::cos(t); };
    const auto u = sample(g, f);
    const auto fo = sample_boundary(g, [&](double t) { return std::exp(g.r1()) * std::cos(t); });
    const auto fi = sample_boundary(g, [&](double t) { return -std::exp(g.r0()) * std::cos(t); });
    const InteriorField l = laplacian(u, fo, g, fi);
    const auto exact = sample(g, [](double r, double t) {
      return std::exp(r) * (1 + 1 / r - 1 / (r * r)) * std::cos(t);
    });
    double e = 0;
    const int lo = closure_rows ? 0 : 1, hi = closure_rows ? g.nr() : g.nr() - 1;
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < g.ntheta(); ++j)
        e = std::max(e, std::abs(l[g.index(i, j)] - exact[g.index(i, j)]));
    return e;
  };
  EXPECT_GE(err(8, false) / err(16, false), 3.6);
  EXPECT_GE(err(16, false) / err(32, false), 3.6);
  // The one-sided closure rows are first order in truncation.
  EXPECT_GE(err(16, true) / err(32, true), 1.8);
}

TEST(Laplacian, SummationByParts) {
  std::mt19937_64 rng(7);
  const AnnulusGrid g = build_grid(0.5, 1.0, 7, 12);
  const auto& w = g.cell_weights();
  for (int trial = 0; trial < 20; ++trial) {
    const InteriorField a = uniform_vector(g.n_interior(), rng);
    const InteriorField b = uniform_vector(g.n_interior(), rng);
    const BoundaryField fo = uniform_vector(12, rng), fi = uniform_vector(12, rng);
    const double lhs = w.dot(laplacian(a, fo, g, fi).cwiseProduct(b)) + gradient_form(a, b, g);
    const double rhs = g.arc_weight() * fo.dot(trace_gamma1(b, g)) +
                       g.inner_arc_weight() * fi.dot(b.head(12));
    const double scale = w.dot(laplacian(a, fo, g, fi).cwiseAbs().cwiseProduct(b.cwiseAbs())) +
                         std::abs(rhs);
    EXPECT_LE(std::abs(lhs - rhs), 1e-11 * scale);
  }
}

TEST(Laplacian, SparseFormMatchesStencil) {
  std::mt19937_64 rng(3);
  const AnnulusGrid g = build_grid(0.5, 1.0, 6, 10);
  const GridOperators ops = assemble_operators(g);
  const InteriorField u = uniform_vector(g.n_interior(), rng);
  const BoundaryField f = uniform_vector(10, rng);
  const InteriorField a = laplacian(u, f, g);
  const InteriorField b = ops.laplacian * u + ops.outer_flux * f;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
  EXPECT_LE((ops.beltrami * f - boundary_laplace_beltrami(f, g)).norm(), 1e-12 * f.norm() * 100);
  EXPECT_EQ(ops.trace * u, trace_gamma1(u, g));
}

TEST(LaplaceBeltrami, Constant) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 16);
  EXPECT_EQ(boundary_laplace_beltrami(BoundaryField::Ones(16), g).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LaplaceBeltrami, FourierSymbol) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 32);
  const double dth = g.dtheta();
  for (int j = 1; j <= 6; ++j) {
    const auto v = sample_boundary(g, [&](double t) { return std::cos(j * t); });
    const BoundaryField l = boundary_laplace_beltrami(v, g);
    const double exact_symbol = -(2 - 2 * std::cos(j * dth)) / (dth * dth);
    EXPECT_LE((l - exact_symbol * v).cwiseAbs().maxCoeff(), 1e-11 * j * j);
    const double cont = -double(j * j);
    const double rel = std::abs(exact_symbol - cont) / std::abs(cont);
    EXPECT_LE(rel, (j * dth) * (j * dth) / 12 + 1e-12);
  }
}

TEST(LaplaceBeltrami, MeanFreeSelfAdjointNegative) {
  std::mt19937_64 rng(11);
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 24);
  for (int trial = 0; trial < 100; ++trial) {
    const BoundaryField a = uniform_vector(24, rng), b = uniform_vector(24, rng);
    const BoundaryField la = boundary_laplace_beltrami(a, g);
    EXPECT_LE(std::abs(quadrature_boundary(la, g)), 1e-12 * la.cwiseAbs().sum());
    const double ab = quadrature_boundary(la.cwiseProduct(b), g);
    const double ba = quadrature_boundary(boundary_laplace_beltrami(b, g).cwiseProduct(a), g);
    EXPECT_LE(std::abs(ab - ba), 1e-12 * (std::abs(ab) + 1));
    EXPECT_LE(quadrature_boundary(la.cwiseProduct(a), g), 0.0);
    EXPECT_NEAR(-quadrature_boundary(la.cwiseProduct(b), g), boundary_gradient_form(a, b, g),
                1e-11 * (std::abs(ab) + 1));
  }
}

TEST(Geometry, CentreSatisfiesCondition) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 16);
  const GeometricReport r = geometric_condition_check(g, {0, 0});
  EXPECT_NEAR(r.min_gamma0, -0.5, 1e-15);
  EXPECT_NEAR(r.min_gamma1, 1.0, 1e-15);
  EXPECT_TRUE(r.satisfied);
}

TEST(Geometry, FarPointFails) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 16);
  EXPECT_FALSE(geometric_condition_check(g, {2.5, 0}).satisfied);
  EXPECT_FALSE(geometric_condition_check(g, {0, -3}).satisfied);
}

TEST(Geometry, PointOnMembraneFails) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 16);
  const GeometricReport r = geometric_condition_check(g, {1.0, 0.0});
  EXPECT_NEAR(r.min_gamma1, 0.0, 1e-15);
  EXPECT_FALSE(r.satisfied);
}

TEST(Grid, DimensionMismatch) {
  const AnnulusGrid g = build_grid(0.5, 1.0, 5, 16);
  EXPECT_THROW(laplacian(InteriorField::Zero(3), BoundaryField::Zero(16), g), DimensionError);
  EXPECT_THROW(quadrature_boundary(BoundaryField::Zero(3), g), DimensionError);
}
