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

#include "wavehum/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace wavehum {

namespace {

void require_size(const Eigen::VectorXd& f, int n, const char* what) {
  if (f.size() != n)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(n) +
                         " values, got " + std::to_string(f.size()));
}

}  // namespace

AnnulusGrid::AnnulusGrid(double r0, double r1, int nr, int ntheta)
    : r0_(r0), r1_(r1), nr_(nr), ntheta_(ntheta) {
  if (!(r0 > 0)) throw ConfigError("r0 must be > 0", "geometry.r0");
  if (!(r1 > r0)) throw ConfigError("r1 must exceed r0", "geometry.r1");
  if (nr < 4) throw ConfigError("Nr must be >= 4", "geometry.Nr");
  if (ntheta < 8 || ntheta % 2 != 0)
    throw ConfigError("Ntheta must be even and >= 8", "geometry.Ntheta");

  dr_ = (r1 - r0) / (nr - 1);
  dtheta_ = 2.0 * std::numbers::pi / ntheta;
  radii_.resize(nr);
  for (int i = 0; i < nr; ++i) radii_[i] = radius(i);

  Eigen::VectorXd ring(nr);
  for (int i = 1; i < nr - 1; ++i) ring[i] = radii_[i] * dr_ * dtheta_;
  ring[0] = (r0 + 0.5 * dr_) * 0.5 * dr_ * dtheta_;
  ring[nr - 1] = (r1 - 0.5 * dr_) * 0.5 * dr_ * dtheta_;

  cell_weights_.resize(n_interior());
  for (int i = 0; i < nr; ++i)
    cell_weights_.segment(i * ntheta, ntheta).setConstant(ring[i]);

  arc_weight_ = (r1 * r1 - 0.25 * dr_ * dr_) / r1 * dtheta_;
  inner_arc_weight_ = (r0 * r0 - 0.25 * dr_ * dr_) / r0 * dtheta_;
  area_ = cell_weights_.sum();
}

AnnulusGrid build_grid(double r0, double r1, int nr, int ntheta) {
  return AnnulusGrid(r0, r1, nr, ntheta);
}

InteriorField laplacian(const InteriorField& u, const BoundaryField& flux_outer,
                        const AnnulusGrid& g, const BoundaryField& flux_inner) {
  require_size(u, g.n_interior(), "laplacian(u)");
  require_size(flux_outer, g.n_boundary(), "laplacian(flux_outer)");
  if (flux_inner.size() != 0)
    require_size(flux_inner, g.n_boundary(), "laplacian(flux_inner)");

  const int nr = g.nr(), nt = g.ntheta();
  const double dr = g.dr(), dr2 = dr * dr, dth2 = g.dtheta() * g.dtheta();
  InteriorField out(g.n_interior());
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
      const double c = u[g.index(i, j)];
      const double ang =
          (u[g.index(i, jp)] - 2.0 * c + u[g.index(i, jm)]) / (r * r * dth2);
      double rad;
      if (i == 0) {
        const double g0 = flux_inner.size() ? flux_inner[j] : 0.0;
        rad = 2.0 * (u[g.index(1, j)] - c) / dr2 + (2.0 / dr - 1.0 / r) * g0;
      } else if (i == nr - 1) {
        rad = 2.0 * (u[g.index(i - 1, j)] - c) / dr2 +
              (2.0 / dr + 1.0 / r) * flux_outer[j];
      } else {
        const double up = u[g.index(i + 1, j)], dn = u[g.index(i - 1, j)];
        rad = (up - 2.0 * c + dn) / dr2 + (up - dn) / (2.0 * r * dr);
      }
      out[g.index(i, j)] = rad + ang;
    }
  }
  return out;
}

BoundaryField boundary_laplace_beltrami(const BoundaryField& v,
                                        const AnnulusGrid& g) {
  require_size(v, g.n_boundary(), "boundary_laplace_beltrami");
  const int nt = g.ntheta();
  const double s = 1.0 / (g.r1() * g.r1() * g.dtheta() * g.dtheta());
  BoundaryField out(nt);
  for (int j = 0; j < nt; ++j)
    out[j] = s * (v[(j + 1) % nt] - 2.0 * v[j] + v[(j + nt - 1) % nt]);
  return out;
}

double gradient_form(const InteriorField& a, const InteriorField& b,
                     const AnnulusGrid& g) {
  require_size(a, g.n_interior(), "gradient_form(a)");
  require_size(b, g.n_interior(), "gradient_form(b)");
  const int nr = g.nr(), nt = g.ntheta();
  const double dr = g.dr(), dth = g.dtheta();
  double radial = 0.0, angular = 0.0;
  for (int i = 0; i + 1 < nr; ++i) {
    const double coef = (g.radius(i) + 0.5 * dr) * dth / dr;
    for (int j = 0; j < nt; ++j) {
      const int p = g.index(i + 1, j), q = g.index(i, j);
      radial += coef * (a[p] - a[q]) * (b[p] - b[q]);
    }
  }
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    const double coef = g.cell_weights()[g.index(i, 0)] / (r * r * dth * dth);
    for (int j = 0; j < nt; ++j) {
      const int p = g.index(i, (j + 1) % nt), q = g.index(i, j);
      angular += coef * (a[p] - a[q]) * (b[p] - b[q]);
    }
  }
  return radial + angular;
}

double boundary_gradient_form(const BoundaryField& a, const BoundaryField& b,
                              const AnnulusGrid& g) {
  require_size(a, g.n_boundary(), "boundary_gradient_form(a)");
  require_size(b, g.n_boundary(), "boundary_gradient_form(b)");
  const int nt = g.ntheta();
  const double coef =
      g.arc_weight() / (g.r1() * g.r1() * g.dtheta() * g.dtheta());
  double sum = 0.0;
  for (int j = 0; j < nt; ++j) {
    const int jp = (j + 1) % nt;
    sum += (a[jp] - a[j]) * (b[jp] - b[j]);
  }
  return coef * sum;
}

BoundaryField trace_gamma1(const InteriorField& u, const AnnulusGrid& g) {
  require_size(u, g.n_interior(), "trace_gamma1");
  return u.segment(g.index(g.outer_ring(), 0), g.ntheta());
}

double quadrature_interior(const InteriorField& f, const AnnulusGrid& g) {
  require_size(f, g.n_interior(), "quadrature_interior");
  return g.cell_weights().dot(f);
}

double quadrature_boundary(const BoundaryField& v, const AnnulusGrid& g) {
  require_size(v, g.n_boundary(), "quadrature_boundary");
  return g.arc_weight() * v.sum();
}

double mean_interior(const InteriorField& f, const AnnulusGrid& g) {
  return quadrature_interior(f, g) / g.area();
}

GeometricReport geometric_condition_check(const AnnulusGrid& g,
                                          const Eigen::Vector2d& x0) {
  GeometricReport rep;
  rep.min_gamma0 = std::numeric_limits<double>::infinity();
  rep.min_gamma1 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ntheta(); ++j) {
    const Eigen::Vector2d e(std::cos(g.theta(j)), std::sin(g.theta(j)));
    // Outward normal of the annulus is -e on the inner circle, +e outside.
    rep.min_gamma0 = std::min(rep.min_gamma0, (g.r0() * e - x0).dot(-e));
    rep.min_gamma1 = std::min(rep.min_gamma1, (g.r1() * e - x0).dot(e));
  }
  rep.satisfied = rep.min_gamma0 <= 0.0 && rep.min_gamma1 > 0.0;
  return rep;
}

GridOperators assemble_operators(const AnnulusGrid& g) {
  const int nr = g.nr(), nt = g.ntheta(), ni = g.n_interior();
  const double dr = g.dr(), dr2 = dr * dr, dth2 = g.dtheta() * g.dtheta();
  using Triplet = Eigen::Triplet<double>;

  std::vector<Triplet> lap;
  lap.reserve(5 * ni);
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    const double ang = 1.0 / (r * r * dth2);
    for (int j = 0; j < nt; ++j) {
      const int row = g.index(i, j);
      lap.emplace_back(row, g.index(i, (j + 1) % nt), ang);
      lap.emplace_back(row, g.index(i, (j + nt - 1) % nt), ang);
      double diag = -2.0 * ang;
      if (i == 0) {
        lap.emplace_back(row, g.index(1, j), 2.0 / dr2);
        diag -= 2.0 / dr2;
      } else if (i == nr - 1) {
        lap.emplace_back(row, g.index(i - 1, j), 2.0 / dr2);
        diag -= 2.0 / dr2;
      } else {
        lap.emplace_back(row, g.index(i + 1, j), 1.0 / dr2 + 0.5 / (r * dr));
        lap.emplace_back(row, g.index(i - 1, j), 1.0 / dr2 - 0.5 / (r * dr));
        diag -= 2.0 / dr2;
      }
      lap.emplace_back(row, row, diag);
    }
  }

  std::vector<Triplet> flux, lb, tr;
  const double inject = 2.0 / dr + 1.0 / g.r1();
  const double lbs = 1.0 / (g.r1() * g.r1() * dth2);
  for (int j = 0; j < nt; ++j) {
    flux.emplace_back(g.index(nr - 1, j), j, inject);
    tr.emplace_back(j, g.index(nr - 1, j), 1.0);
    lb.emplace_back(j, (j + 1) % nt, lbs);
    lb.emplace_back(j, (j + nt - 1) % nt, lbs);
    lb.emplace_back(j, j, -2.0 * lbs);
  }

  GridOperators ops;
  ops.laplacian.resize(ni, ni);
  ops.laplacian.setFromTriplets(lap.begin(), lap.end());
  ops.outer_flux.resize(ni, nt);
  ops.outer_flux.setFromTriplets(flux.begin(), flux.end());
  ops.beltrami.resize(nt, nt);
  ops.beltrami.setFromTriplets(lb.begin(), lb.end());
  ops.trace.resize(nt, ni);
  ops.trace.setFromTriplets(tr.begin(), tr.end());
  return ops;
}

}  // namespace wavehum
