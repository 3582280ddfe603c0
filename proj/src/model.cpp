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

#include "wavehum/model.hpp"

#include <vector>

namespace wavehum {

namespace {

void require_grid(const PhaseVector& s, const AnnulusGrid& g) {
  if (!s.matches(g))
    throw DimensionError("phase vector does not live on this grid");
}

}  // namespace

double inner_product(const PhaseVector& a, const PhaseVector& b,
                     const PhysicalParams& p, const AnnulusGrid& g) {
  require_grid(a, g);
  require_grid(b, g);
  const auto& w = g.cell_weights();
  const double beta = g.arc_weight();
  const double interior =
      (w.array() * a.block(2).array() * b.block(2).array()).sum() / p.c2() +
      gradient_form(a.block(0), b.block(0), g);
  const double boundary =
      beta * (p.m() / p.rho()) * a.block(3).dot(b.block(3)) +
      (p.sigma() / p.rho()) * boundary_gradient_form(a.block(1), b.block(1), g) +
      beta * (p.k() / p.rho()) * a.block(1).dot(b.block(1));
  return interior + boundary;
}

double norm_sq(const PhaseVector& a, const PhysicalParams& p,
               const AnnulusGrid& g) {
  return inner_product(a, a, p, g);
}

EnergyBreakdown energy(const PhaseVector& s, const PhysicalParams& p,
                       const AnnulusGrid& g) {
  require_grid(s, g);
  const auto& w = g.cell_weights();
  const double beta = g.arc_weight();
  EnergyBreakdown e;
  e.kinetic_interior = 0.5 * (w.array() * s.block(2).array().square()).sum() / p.c2();
  e.potential_interior = 0.5 * gradient_form(s.block(0), s.block(0), g);
  e.kinetic_boundary = 0.5 * beta * (p.m() / p.rho()) * s.block(3).squaredNorm();
  e.membrane = 0.5 * (p.sigma() / p.rho()) *
               boundary_gradient_form(s.block(1), s.block(1), g);
  e.spring = 0.5 * beta * (p.k() / p.rho()) * s.block(1).squaredNorm();
  e.total = e.kinetic_interior + e.potential_interior + e.kinetic_boundary +
            e.membrane + e.spring;
  return e;
}

double hooke_invariant(const PhaseVector& s, const PhysicalParams& p,
                       const AnnulusGrid& g) {
  require_grid(s, g);
  return p.rho() * quadrature_interior(s.block(2), g) -
         quadrature_boundary(s.block(1), g) / p.kappa();
}

StateVector apply_generator(const StateVector& s, const PhysicalParams& p,
                            const AnnulusGrid& g) {
  require_grid(s, g);
  StateVector out(g);
  out.u() = s.ut();
  out.v() = s.vt();
  out.ut() = p.c2() * laplacian(s.u(), s.vt(), g);
  out.vt() = (p.sigma() * boundary_laplace_beltrami(s.v(), g) - p.d() * s.vt() -
              p.k() * s.v() - p.rho() * trace_gamma1(s.ut(), g)) /
             p.m();
  return out;
}

AdjointState apply_adjoint_generator(const AdjointState& z,
                                     const PhysicalParams& p,
                                     const AnnulusGrid& g) {
  require_grid(z, g);
  AdjointState out(g);
  out.phi() = -z.phit();
  out.delta() = -z.deltat();
  out.phit() = -p.c2() * laplacian(z.phi(), z.deltat(), g);
  out.deltat() = (-p.sigma() * boundary_laplace_beltrami(z.delta(), g) -
                  p.d() * z.deltat() + p.k() * z.delta() +
                  p.rho() * trace_gamma1(z.phit(), g)) /
                 p.m();
  return out;
}

double dissipativity_residual(const StateVector& s, const PhysicalParams& p,
                              const AnnulusGrid& g) {
  return inner_product(apply_generator(s, p, g), s, p, g) +
         (p.d() / p.rho()) * g.arc_weight() * s.vt().squaredNorm();
}

double adjoint_dissipativity_residual(const AdjointState& z,
                                      const PhysicalParams& p,
                                      const AnnulusGrid& g) {
  return inner_product(apply_adjoint_generator(z, p, g), z, p, g) +
         (p.d() / p.rho()) * g.arc_weight() * z.deltat().squaredNorm();
}

SparseMatrix metric_matrix(const PhysicalParams& p, const AnnulusGrid& g) {
  const GridOperators ops = assemble_operators(g);
  const int ni = g.n_interior(), nb = g.n_boundary(), half = ni + nb;
  const double beta = g.arc_weight();
  const auto& w = g.cell_weights();

  std::vector<Eigen::Triplet<double>> t;
  for (int r = 0; r < ni; ++r)
    for (SparseMatrix::InnerIterator it(ops.laplacian, r); it; ++it)
      t.emplace_back(r, it.col(), -0.5 * w[r] * it.value());
  for (int r = 0; r < ni; ++r)
    for (SparseMatrix::InnerIterator it(ops.laplacian, r); it; ++it)
      t.emplace_back(it.col(), r, -0.5 * w[r] * it.value());
  for (int r = 0; r < nb; ++r) {
    for (SparseMatrix::InnerIterator it(ops.beltrami, r); it; ++it)
      t.emplace_back(ni + r, ni + it.col(),
                     -(p.sigma() / p.rho()) * beta * it.value());
    t.emplace_back(ni + r, ni + r, (p.k() / p.rho()) * beta);
    t.emplace_back(half + ni + r, half + ni + r, (p.m() / p.rho()) * beta);
  }
  for (int r = 0; r < ni; ++r) t.emplace_back(half + r, half + r, w[r] / p.c2());

  SparseMatrix m(2 * half, 2 * half);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

BoundaryField adjoint_membrane_acceleration(const AdjointState& z,
                                            const PhysicalParams& p,
                                            const AnnulusGrid& g) {
  require_grid(z, g);
  return (-p.rho() * trace_gamma1(z.phit(), g) +
          p.sigma() * boundary_laplace_beltrami(z.delta(), g) +
          p.d() * z.deltat() - p.k() * z.delta()) /
         p.m();
}

}  // namespace wavehum
