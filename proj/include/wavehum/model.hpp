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

#include "wavehum/grid.hpp"
#include "wavehum/params.hpp"
#include "wavehum/state.hpp"

namespace wavehum {

/// Parts of the phase-space energy 1/2 (s, s)_H.
struct EnergyBreakdown {
  double kinetic_interior = 0;   // 1/2 int c^-2 u_t^2
  double potential_interior = 0; // 1/2 int |grad u|^2
  double kinetic_boundary = 0;   // 1/2 int (m / rho) v_t^2
  double membrane = 0;           // 1/2 int (sigma / rho) |grad_G v|^2
  double spring = 0;             // 1/2 int (k / rho) v^2
  double total = 0;
};

/// (a, b)_H. Constants in the interior displacement are invisible.
double inner_product(const PhaseVector& a, const PhaseVector& b,
                     const PhysicalParams& p, const AnnulusGrid& g);
double norm_sq(const PhaseVector& a, const PhysicalParams& p,
               const AnnulusGrid& g);

EnergyBreakdown energy(const PhaseVector& s, const PhysicalParams& p,
                       const AnnulusGrid& g);

/// rho int u_t - (1 / kappa) int_Gamma1 v, the macroscopic Hooke law residual.
double hooke_invariant(const PhaseVector& s, const PhysicalParams& p,
                       const AnnulusGrid& g);

/// Removes the interior mean of the displacement and shifts the interior
/// velocity by a constant so that the Hooke residual vanishes. Idempotent.
template <PhaseLike T>
T project_constraints(T s, const PhysicalParams& p, const AnnulusGrid& g) {
  auto u = s.block(0);
  u.array() -= mean_interior(u, g);
  const double h = hooke_invariant(s, p, g);
  if (h != 0.0) s.block(2).array() -= h / (p.rho() * g.area());
  return s;
}

/// Subtracts the weighted mean of the interior displacement only.
template <PhaseLike T>
void remove_displacement_mean(T& s, const AnnulusGrid& g) {
  auto u = s.block(0);
  u.array() -= mean_interior(u, g);
}

/// Discrete generator A_h.
StateVector apply_generator(const StateVector& s, const PhysicalParams& p,
                            const AnnulusGrid& g);
/// H-adjoint A_h^* of the discrete generator.
AdjointState apply_adjoint_generator(const AdjointState& z,
                                     const PhysicalParams& p,
                                     const AnnulusGrid& g);

/// Re (A_h s, s)_H + (d / rho) int_Gamma1 v_t^2.
double dissipativity_residual(const StateVector& s, const PhysicalParams& p,
                              const AnnulusGrid& g);
/// Re (A_h^* z, z)_H + (d / rho) int_Gamma1 delta_t^2.
double adjoint_dissipativity_residual(const AdjointState& z,
                                      const PhysicalParams& p,
                                      const AnnulusGrid& g);

/// Sparse Gram matrix M of the H form in phase coordinates: (a, b)_H = a^T M b.
SparseMatrix metric_matrix(const PhysicalParams& p, const AnnulusGrid& g);

/// Membrane acceleration of the backward system evaluated from its
/// equation: (1/m) [ -rho phi_t + sigma Lap_G delta + d delta_t - k delta ].
BoundaryField adjoint_membrane_acceleration(const AdjointState& z,
                                            const PhysicalParams& p,
                                            const AnnulusGrid& g);

}  // namespace wavehum
