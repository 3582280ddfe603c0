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
#include <random>
#include <vector>

#include "wavehum/forward.hpp"

namespace wavehum {

/// Fourier-diagonal Q-Wiener noise on Gamma1. Frequencies 0 .. n_modes - 1;
/// every frequency j >= 1 below Nyquist carries a cosine and a sine mode,
/// the Nyquist frequency only its cosine. Mode variance q_j = q0 (1 + j^2)^-s.
struct NoiseModel {
  int n_modes = 9;
  double q0 = 1.0;
  double decay_s = 1.5;
  std::uint64_t seed = 12345;

  void validate(const AnnulusGrid& g) const;
  double q(int j) const;
  /// Sum of q over all basis functions.
  double trace(const AnnulusGrid& g) const;
};

/// Independent normal stream of one path; the state is a function of
/// (seed, path, stream) only.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream = 0);
  double normal() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_;
};

/// Discretely orthonormal (weight arc_weight) Fourier basis on Gamma1 with
/// the mode standard deviations, cached for one grid.
class NoiseBasis {
 public:
  NoiseBasis(const NoiseModel& nm, const AnnulusGrid& g);

  int size() const { return static_cast<int>(modes_.cols()); }
  const Eigen::MatrixXd& modes() const { return modes_; }    // Ntheta x size
  const Eigen::VectorXd& variance() const { return q_; }     // per basis function
  const std::vector<int>& frequency() const { return freq_; }

  /// sum_b sqrt(q_b dt) xi_b e_b.
  BoundaryField increment(double dt, PathRng& rng) const;

 private:
  Eigen::MatrixXd modes_;
  Eigen::VectorXd q_;
  std::vector<int> freq_;
};

BoundaryField sample_increment(const NoiseModel& nm, const AnnulusGrid& g, double dt,
                               PathRng& rng);

/// Midpoint drift with the increment dW / m added to v_t inside the same
/// implicit step.
class StochasticStepper {
 public:
  StochasticStepper(const PhysicalParams& p, const AnnulusGrid& g, double dt,
                    const NoiseModel& nm);

  const ForwardSolver& deterministic() const { return forward_; }
  const NoiseBasis& basis() const { return basis_; }
  double dt() const { return forward_.dt(); }

  void advance(StateVector& s, PathRng& rng) const;
  void advance_with_increment(StateVector& s, const BoundaryField& dw) const;

 private:
  ForwardSolver forward_;
  NoiseBasis basis_;
};

StateVector sde_step(const StateVector& s, double dt, const NoiseModel& nm, PathRng& rng,
                     const PhysicalParams& p, const AnnulusGrid& g);

/// v and v_t at four probe angles (theta indices 0, N/4, N/2, 3N/4).
struct ProbeObservables {
  explicit ProbeObservables(const AnnulusGrid& g);
  static constexpr int n_linear = 8;
  std::vector<int> theta_index;
  Eigen::VectorXd linear(const StateVector& s) const;
  /// Linear observables as rows acting on phase vectors.
  Eigen::MatrixXd functionals(const AnnulusGrid& g) const;
};

struct EnsembleOptions {
  int n_paths = 2000;
  int n_steps = 0;
  std::vector<int> checkpoints;  // step indices, increasing
  std::uint64_t seed = 12345;
  std::uint64_t stream = 0;
  int threads = 0;               // 0: hardware concurrency
};

struct EnsembleResult {
  std::vector<double> times;                  // checkpoint times
  std::vector<Eigen::MatrixXd> observables;   // per checkpoint: n_paths x 9 (8 linear + energy)
  std::vector<double> mean_norm_sq;           // per checkpoint, |X|_H^2 averaged over paths
  std::vector<double> max_hooke_drift;        // per checkpoint, worst path
  Eigen::MatrixXd mean_state;                 // per checkpoint column: ensemble mean
};

/// Runs n_paths independent paths from s0. Path i draws from
/// PathRng(seed, i, stream); results do not depend on the thread count.
EnsembleResult run_ensemble(const StochasticStepper& stepper, const StateVector& s0,
                            const EnsembleOptions& opt);

/// Stationary covariance in H-orthonormal coordinates of the constrained
/// space, from the Cayley form of the discrete Lyapunov equation solved by
/// doubling. Returned with the continuous-time residual.
struct LyapunovSolution {
  Eigen::MatrixXd basis;        // phase-space columns, H-orthonormal
  Eigen::MatrixXd generator;    // A in those coordinates
  Eigen::MatrixXd noise;        // B Q^{1/2} in those coordinates
  Eigen::MatrixXd covariance;   // P
  Eigen::MatrixXd step;         // Cayley map (I - dt A / 2)^-1 (I + dt A / 2)
  double dt = 0;
  double residual = 0;          // |A P + P A' + B Q B'| / |P|
  double symmetry = 0;          // |P - P'| / |P|
  int doublings = 0;

  /// Phase-space covariance restricted to linear functionals (rows).
  Eigen::MatrixXd project(const Eigen::MatrixXd& functionals) const;
  /// E |X|_H^2 under P.
  double trace() const { return covariance.trace(); }
  /// Covariance after time t from a deterministic start: P - S(t) P S(t)'.
  Eigen::MatrixXd transient(double t) const;
};

LyapunovSolution stationary_covariance_oracle(const PhysicalParams& p, const AnnulusGrid& g,
                                              const NoiseModel& nm, double dt);

struct MomentBoundReport {
  double initial_mean = 0;
  double sup_mean = 0;
  double bound_const = 0;   // trace of the stationary covariance
  double margin = 0;        // initial_mean + bound_const - sup_mean
  bool satisfied = false;
  double stationary_vt_sq = 0;  // Tr Q / (2 d m): stationary E |v_t|^2 on Gamma1
};

MomentBoundReport moment_bound_check(const EnsembleResult& ens, const LyapunovSolution& oracle,
                                     const PhysicalParams& p, const AnnulusGrid& g,
                                     const NoiseModel& nm);

/// Energy distance statistic n m / (n + m) E(X, Y) on standardised columns
/// and its permutation distribution.
struct EnergyDistanceTest {
  double statistic = 0;
  double critical_value = 0;  // 95% quantile of the permutation statistics
  double p_value = 1;
};

EnergyDistanceTest energy_distance_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                        int n_permutations, std::uint64_t seed);

struct MixingReport {
  std::vector<double> times;
  std::vector<double> dist_series;
  std::vector<double> critical_values;
  Eigen::MatrixXd stationary_cov_mc;
  Eigen::MatrixXd stationary_cov_oracle;
  Eigen::MatrixXd z_scores;
  double max_abs_z = 0;
  bool merged = false;  // last distance below its critical value
};

struct MixingOptions {
  double T_final = 50;
  int n_checkpoints = 5;
  int n_paths = 2000;
  int n_permutations = 199;
  int threads = 0;
};

MixingReport mixing_experiment(const StateVector& s0_a, const StateVector& s0_b,
                               const StochasticStepper& stepper, const LyapunovSolution& oracle,
                               const MixingOptions& opt, const NoiseModel& nm);

/// CSV with columns checkpoint,distance,critical_value.
void write_distance_csv(std::ostream& os, const MixingReport& r);
/// CSV with columns observable_i,observable_j,mc_cov,oracle_cov,z.
void write_covariance_csv(std::ostream& os, const MixingReport& r);

}  // namespace wavehum
