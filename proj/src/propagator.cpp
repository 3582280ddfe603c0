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

#include "wavehum/propagator.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace wavehum {

MidpointPropagator::MidpointPropagator(const PhysicalParams& p,
                                       const AnnulusGrid& g, double dt,
                                       Coupling coupling)
    : params_(p), grid_(g), dt_(dt) {
  if (!(std::isfinite(dt) && dt != 0.0))
    throw ConfigError("time step must be finite and nonzero", "horizon.dt");
  const GridOperators ops = assemble_operators(g);
  const int ni = g.n_interior(), nb = g.n_boundary(), half = ni + nb;
  const double s = coupling == Coupling::forward ? 1.0 : -1.0;
  using Triplet = Eigen::Triplet<double>;

  std::vector<Triplet> kt, ct;
  for (int r = 0; r < ni; ++r)
    for (SparseMatrix::InnerIterator it(ops.laplacian, r); it; ++it)
      kt.emplace_back(r, it.col(), p.c2() * it.value());
  for (int r = 0; r < nb; ++r) {
    for (SparseMatrix::InnerIterator it(ops.beltrami, r); it; ++it)
      kt.emplace_back(ni + r, ni + it.col(), p.sigma() * it.value() / p.m());
    kt.emplace_back(ni + r, ni + r, -p.k() / p.m());
  }
  for (int r = 0; r < ni; ++r)
    for (SparseMatrix::InnerIterator it(ops.outer_flux, r); it; ++it)
      ct.emplace_back(r, ni + it.col(), s * p.c2() * it.value());
  for (int r = 0; r < nb; ++r) {
    for (SparseMatrix::InnerIterator it(ops.trace, r); it; ++it)
      ct.emplace_back(ni + r, it.col(), -s * p.rho() * it.value() / p.m());
    ct.emplace_back(ni + r, ni + r, -p.d() / p.m());
  }
  k_.resize(half, half);
  k_.setFromTriplets(kt.begin(), kt.end());
  c_.resize(half, half);
  c_.setFromTriplets(ct.begin(), ct.end());

  SparseMatrix id(half, half);
  id.setIdentity();
  const double a = 0.25 * dt * dt, b = 0.5 * dt;
  plus_ = id + a * k_ + b * c_;
  minus_ = SparseMatrix(id - a * k_ - b * c_);
  minus_.makeCompressed();

  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(minus_);
  lu_->factorize(minus_);
  if (lu_->info() != Eigen::Success)
    throw SolverError("midpoint system factorisation failed: " +
                          lu_->lastErrorMessage(),
                      0);
}

void MidpointPropagator::advance(PhaseVector& x,
                                 const Eigen::VectorXd& source) const {
  if (!x.matches(grid_))
    throw DimensionError("propagator applied to a vector from another grid");
  const int half = x.half();
  auto u0 = x.config();
  auto v0 = x.velocity();

  Eigen::VectorXd rhs = plus_ * v0 + dt_ * (k_ * u0);
  if (source.size() != 0) {
    if (source.size() != half)
      throw DimensionError("source must cover the velocity block");
    rhs += dt_ * source;
  }

  Eigen::VectorXd v1 = lu_->solve(rhs);
  const double scale = rhs.norm();
  int refinements = 0;
  for (;;) {
    const Eigen::VectorXd r = rhs - minus_ * v1;
    if (r.norm() <= solve_tolerance * scale) break;
    if (refinements == max_refinements)
      throw SolverError("midpoint solve stalled at relative residual " +
                            std::to_string(r.norm() / scale),
                        refinements + 1);
    v1 += lu_->solve(r);
    ++refinements;
  }

  u0 += 0.5 * dt_ * (v0 + v1);
  v0 = v1;
  auto u = x.block(0);
  u.array() -= mean_interior(u, grid_);
}

}  // namespace wavehum
