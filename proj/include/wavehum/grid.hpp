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

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wavehum/errors.hpp"

namespace wavehum {

/// Node values on the interior polar grid, ring-major: index i * ntheta + j.
using InteriorField = Eigen::VectorXd;
/// Node values on the outer circle (the membrane), periodic in theta.
using BoundaryField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Polar grid on the annulus r0 <= r <= r1. Ring 0 is the rigid inner circle,
/// ring nr - 1 is the membrane. Nodes sit on both circles.
///
/// Quadrature weights are the diagonal norm of the summation-by-parts
/// closure: interior rings carry r_i dr dtheta, the two boundary rings carry
/// half cells whose radial lever arm is the adjacent half-node radius. With
/// these weights the discrete Green identity holds to round-off, and the
/// matching arc weight on the membrane is (r1 - dr^2 / (4 r1)) dtheta.
class AnnulusGrid {
 public:
  AnnulusGrid(double r0, double r1, int nr, int ntheta);

  double r0() const { return r0_; }
  double r1() const { return r1_; }
  int nr() const { return nr_; }
  int ntheta() const { return ntheta_; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }

  int n_interior() const { return nr_ * ntheta_; }
  int n_boundary() const { return ntheta_; }
  int index(int i, int j) const { return i * ntheta_ + j; }
  int outer_ring() const { return nr_ - 1; }

  double radius(int i) const { return r0_ + i * dr_; }
  double theta(int j) const { return j * dtheta_; }
  const Eigen::VectorXd& node_radii() const { return radii_; }

  /// Per-node interior quadrature weights (length n_interior).
  const Eigen::VectorXd& cell_weights() const { return cell_weights_; }
  /// Weight of one membrane node.
  double arc_weight() const { return arc_weight_; }
  /// Weight of one node on the inner circle (only used for inhomogeneous fluxes).
  double inner_arc_weight() const { return inner_arc_weight_; }
  /// Radius whose circle has the discrete membrane length: arc_weight / dtheta.
  double arc_radius() const { return arc_weight_ / dtheta_; }

  double area() const { return area_; }
  double perimeter() const { return arc_weight_ * ntheta_; }

  bool same_shape(const AnnulusGrid& other) const {
    return nr_ == other.nr_ && ntheta_ == other.ntheta_ && r0_ == other.r0_ &&
           r1_ == other.r1_;
  }

 private:
  double r0_, r1_;
  int nr_, ntheta_;
  double dr_, dtheta_;
  Eigen::VectorXd radii_;
  Eigen::VectorXd cell_weights_;
  double arc_weight_;
  double inner_arc_weight_;
  double area_;
};

AnnulusGrid build_grid(double r0, double r1, int nr, int ntheta);

/// Second-order polar Laplacian u_rr + u_r / r + u_thth / r^2. The outward
/// normal derivative on the membrane is flux_outer; on the inner circle it is
/// flux_inner (empty means homogeneous Neumann). Ghost nodes are eliminated
/// with the reflected centred difference, so quadratics in r are exact.
InteriorField laplacian(const InteriorField& u, const BoundaryField& flux_outer,
                        const AnnulusGrid& g,
                        const BoundaryField& flux_inner = BoundaryField());

/// (1 / r1^2) times the periodic three-point second difference in theta.
BoundaryField boundary_laplace_beltrami(const BoundaryField& v,
                                        const AnnulusGrid& g);

/// Discrete  int grad a . grad b dx  matching laplacian() by parts.
double gradient_form(const InteriorField& a, const InteriorField& b,
                     const AnnulusGrid& g);
/// Discrete  int_Gamma1 grad_G a . grad_G b  matching boundary_laplace_beltrami().
double boundary_gradient_form(const BoundaryField& a, const BoundaryField& b,
                              const AnnulusGrid& g);

BoundaryField trace_gamma1(const InteriorField& u, const AnnulusGrid& g);
double quadrature_interior(const InteriorField& f, const AnnulusGrid& g);
double quadrature_boundary(const BoundaryField& v, const AnnulusGrid& g);
/// Weighted mean of an interior field.
double mean_interior(const InteriorField& f, const AnnulusGrid& g);

struct GeometricReport {
  double min_gamma0 = 0;
  double min_gamma1 = 0;
  bool satisfied = false;
};

/// Samples (x - x0) . n on both circles at the grid angles.
GeometricReport geometric_condition_check(const AnnulusGrid& g,
                                          const Eigen::Vector2d& x0);

/// Sparse forms of the operators above, used by the time steppers.
struct GridOperators {
  SparseMatrix laplacian;      // n_interior x n_interior, zero fluxes
  SparseMatrix outer_flux;     // n_interior x n_boundary, flux injection
  SparseMatrix beltrami;       // n_boundary x n_boundary
  SparseMatrix trace;          // n_boundary x n_interior
};

GridOperators assemble_operators(const AnnulusGrid& g);

}  // namespace wavehum
