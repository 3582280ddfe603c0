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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wavehum/adjoint.hpp"
#include "wavehum/krylov.hpp"

namespace wavehum {

/// Smooth window on [0, T]: zeta(t) = s(t / eps0) s((T - t) / eps0), with
/// s the C-infinity step built from exp(-1/x).
class CutoffProfile {
 public:
  CutoffProfile(double T, double dt, double eps0);

  static double smooth_step(double x);
  double value(double t) const;

  double eps0() const { return eps0_; }
  double T() const { return grid_.T(); }
  const TimeGrid& time_grid() const { return grid_; }
  /// zeta at the step nodes t_0 .. t_N.
  const Eigen::VectorXd& samples() const { return samples_; }

 private:
  TimeGrid grid_;
  double eps0_;
  Eigen::VectorXd samples_;
};

CutoffProfile make_cutoff(double T, double dt, double eps0);

/// Weighting of the acceleration term of the observation norm.
enum class ObsNorm { plain, cutoff };

ObsNorm parse_obs_norm(const std::string& s);
const char* to_string(ObsNorm m);

struct HumOptions {
  KrylovOptions krylov;
  double tikhonov = 0.0;
};

struct MinimizeResult {
  AdjointState minimizer;
  KrylovResult krylov;
  double tikhonov = 0.0;
};

struct NullControlReport {
  double free_norm = 0;        // |X(T; s0, 0)|_H
  double controlled_norm = 0;  // |X(T; s0, f)|_H
  double ratio = 1;
};

struct SignValidation {
  int sign = -1;
  double ratio_plus = 0;
  double ratio_minus = 0;
};

/// Discrete HUM problem on [0, T] for one grid and parameter set. The
/// Gramian is G z = -rho c^2 X(T; 0, f_raw(z)), where f_raw is the control
/// synthesised from the backward run of z; with the exact discrete duality
/// this gives (G z, w)_H = Q(z, w), the discrete observation pairing.
class HumProblem {
 public:
  HumProblem(const PhysicalParams& p, const AnnulusGrid& g, double T, double dt,
             ObsNorm mode, double eps0);

  const PhysicalParams& params() const { return params_; }
  const AnnulusGrid& grid() const { return grid_; }
  const TimeGrid& time_grid() const { return tg_; }
  ObsNorm mode() const { return mode_; }
  const CutoffProfile& cutoff() const { return cutoff_; }
  /// Node weights chi of the acceleration term (zeta^2 or 1).
  const Eigen::VectorXd& weights() const { return chi_; }
  const ForwardSolver& forward() const { return forward_; }
  const AdjointSolver& backward() const { return backward_; }

  double dot(const PhaseVector& a, const PhaseVector& b) const {
    return inner_product(a, b, params_, grid_);
  }

  ObservationRecord observe(const AdjointState& z, AdjointState* initial = nullptr) const;
  double quadratic_form(const AdjointState& z) const;

  /// (1/c^2) [y_n - (g_n+1 - g_n) / dt] with g_k = chi_k delta_tt(t_k) and
  /// g_0 = g_N = 0; the physical control is sign times this.
  ControlSignal raw_control(const ObservationRecord& obs) const;
  ControlSignal synthesize(const AdjointState& z, int sign) const;

  AdjointState gramian_apply(const AdjointState& z) const;

  /// The seven t = 0 pairing integrals of J, evaluated literally.
  double linear_term(const StateVector& s0, const AdjointState& z0,
                     const BoundaryField& deltatt0) const;
  /// rho c^2 S(T) s0, the Riesz representative of the linear term.
  AdjointState linear_representative(const StateVector& s0) const;

  double j_value(const AdjointState& z, const StateVector& s0) const;
  AdjointState j_gradient(const AdjointState& z, const StateVector& s0) const;

  MinimizeResult minimize(const StateVector& s0, const HumOptions& opt) const;

  NullControlReport verify_null_control(const StateVector& s0,
                                        const ControlSignal& f) const;
  /// Runs both signs on the minimiser and keeps the one with the smaller
  /// terminal norm.
  SignValidation validate_sign(const StateVector& s0, const AdjointState& zhat) const;

 private:
  PhysicalParams params_;
  AnnulusGrid grid_;
  TimeGrid tg_;
  ObsNorm mode_;
  CutoffProfile cutoff_;
  Eigen::VectorXd chi_;
  ForwardSolver forward_;
  AdjointSolver backward_;
};

// Free-function forms. Each builds a HumProblem (two factorisations).
AdjointState gramian_apply(const AdjointState& z, double T, double dt,
                           const PhysicalParams& p, const AnnulusGrid& g,
                           const CutoffProfile& cutoff);
double j_value(const AdjointState& z, const StateVector& s0, double T, double dt,
               const PhysicalParams& p, const AnnulusGrid& g,
               const CutoffProfile& cutoff);
AdjointState j_gradient(const AdjointState& z, const StateVector& s0, double T,
                        double dt, const PhysicalParams& p, const AnnulusGrid& g,
                        const CutoffProfile& cutoff);
MinimizeResult minimize_j(const StateVector& s0, double T, double dt,
                          const PhysicalParams& p, const AnnulusGrid& g,
                          const CutoffProfile& cutoff, const HumOptions& opt);
ControlSignal synthesize_control(const ObservationRecord& obs,
                                 const CutoffProfile& cutoff,
                                 const PhysicalParams& p, int sign);
NullControlReport verify_null_control(const StateVector& s0, const ControlSignal& f,
                                      double T, double dt, const PhysicalParams& p,
                                      const AnnulusGrid& g);

/// Exact control to a reachable target: target = X(T; s1, probe). The
/// null control of s0 - s1 is added to the probe.
struct ExactControlResult {
  ControlSignal control;
  StateVector target;
  StateVector reached;
  double relative_error = 0;
  MinimizeResult solve;
};

ExactControlResult exact_control(const HumProblem& hum, const StateVector& s0,
                                 const StateVector& s1, const ControlSignal& probe,
                                 const HumOptions& opt, int sign);

/// Orthonormal (in H) coordinates of the constrained space
/// {mean(u) = 0, Hooke residual = 0}. Columns are phase vectors.
Eigen::MatrixXd constrained_basis(const PhysicalParams& p, const AnnulusGrid& g);

/// Dense matrix of the Gramian in the basis above, symmetrised.
Eigen::MatrixXd dense_gramian(const HumProblem& hum, const Eigen::MatrixXd& basis);

struct ObservabilityReport {
  double T = 0;
  ObsNorm mode = ObsNorm::plain;
  int sample_count = 0;
  double ct_estimate = 0;        // max of |z|^2 / obs over samples and the Ritz vector
  double ct_samples = 0;         // max over random samples only
  double rayleigh_min = 0;       // Rayleigh quotient of the inverse-iteration vector
  int inverse_iterations = 0;
  bool consistent = false;       // ct_estimate * rayleigh_min within [1, 1.05]
  bool weak = false;             // rayleigh_min below 1e-8
  bool unobservable_mode = false;
  std::optional<AdjointState> offending;
};

ObservabilityReport estimate_observability(const HumProblem& hum, int n_samples,
                                           std::uint64_t seed,
                                           int inverse_iterations = 20);
ObservabilityReport estimate_observability(double T, double dt, const PhysicalParams& p,
                                           const AnnulusGrid& g, int n_samples,
                                           ObsNorm mode, double eps0, std::uint64_t seed);

/// CSV with columns t,theta_index,f (t is the interval midpoint).
void write_control_csv(std::ostream& os, const ControlSignal& f);
ControlSignal read_control_csv(std::istream& is, double dt);

}  // namespace wavehum
