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

#include "wavehum/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include <Eigen/LU>

#include "wavehum/hum.hpp"
#include "wavehum/io.hpp"

namespace wavehum {

namespace {

constexpr int path_chunk = 32;

int frequency_limit(const AnnulusGrid& g) { return g.ntheta() / 2; }

}  // namespace

void NoiseModel::validate(const AnnulusGrid& g) const {
  if (n_modes < 1) throw ConfigError("n_modes must be >= 1", "noise.n_modes");
  if (n_modes - 1 > frequency_limit(g))
    throw ConfigError("n_modes exceeds the resolvable frequencies (Ntheta / 2 + 1)",
                      "noise.n_modes");
  if (!(q0 >= 0) || !std::isfinite(q0)) throw ConfigError("q0 must be >= 0", "noise.q0");
  if (!(decay_s > 1) || !std::isfinite(decay_s))
    throw ConfigError("decay_s must be > 1 (trace-class noise)", "noise.decay_s");
}

double NoiseModel::q(int j) const {
  return q0 * std::pow(1.0 + static_cast<double>(j) * j, -decay_s);
}

double NoiseModel::trace(const AnnulusGrid& g) const {
  double t = 0;
  for (int j = 0; j < n_modes; ++j) t += (j == 0 || 2 * j == g.ntheta()) ? q(j) : 2 * q(j);
  return t;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

NoiseBasis::NoiseBasis(const NoiseModel& nm, const AnnulusGrid& g) {
  nm.validate(g);
  const int nt = g.ntheta();
  const double len = 2 * std::numbers::pi * g.arc_radius();
  std::vector<Eigen::VectorXd> cols;
  std::vector<double> q;
  for (int j = 0; j < nm.n_modes; ++j) {
    const bool single = j == 0 || 2 * j == nt;
    Eigen::VectorXd c(nt), s(nt);
    for (int k = 0; k < nt; ++k) {
      c[k] = std::cos(j * g.theta(k));
      s[k] = std::sin(j * g.theta(k));
    }
    const double scale = single ? 1.0 / std::sqrt(len) : std::sqrt(2.0 / len);
    cols.push_back(scale * c);
    q.push_back(nm.q(j));
    freq_.push_back(j);
    if (!single) {
      cols.push_back(scale * s);
      q.push_back(nm.q(j));
      freq_.push_back(j);
    }
  }
  modes_.resize(nt, static_cast<Eigen::Index>(cols.size()));
  q_.resize(static_cast<Eigen::Index>(q.size()));
  for (std::size_t b = 0; b < cols.size(); ++b) {
    modes_.col(static_cast<Eigen::Index>(b)) = cols[b];
    q_[static_cast<Eigen::Index>(b)] = q[b];
  }
}

BoundaryField NoiseBasis::increment(double dt, PathRng& rng) const {
  Eigen::VectorXd xi(q_.size());
  for (Eigen::Index b = 0; b < xi.size(); ++b) xi[b] = std::sqrt(q_[b] * dt) * rng.normal();
  return modes_ * xi;
}

BoundaryField sample_increment(const NoiseModel& nm, const AnnulusGrid& g, double dt,
                               PathRng& rng) {
  return NoiseBasis(nm, g).increment(dt, rng);
}

StochasticStepper::StochasticStepper(const PhysicalParams& p, const AnnulusGrid& g, double dt,
                                     const NoiseModel& nm)
    : forward_(p, g, dt), basis_(nm, g) {
  if (!(dt > 0)) throw ConfigError("dt must be > 0", "noise.dt");
}

void StochasticStepper::advance_with_increment(StateVector& s, const BoundaryField& dw) const {
  const MidpointPropagator& prop = forward_.propagator();
  const AnnulusGrid& g = prop.grid();
  Eigen::VectorXd src = Eigen::VectorXd::Zero(g.n_interior() + g.n_boundary());
  src.tail(g.n_boundary()) = dw / (prop.params().m() * prop.dt());
  prop.advance(s, src);
}

void StochasticStepper::advance(StateVector& s, PathRng& rng) const {
  advance_with_increment(s, basis_.increment(dt(), rng));
}

StateVector sde_step(const StateVector& s, double dt, const NoiseModel& nm, PathRng& rng,
                     const PhysicalParams& p, const AnnulusGrid& g) {
  StochasticStepper stepper(p, g, dt, nm);
  StateVector out = s;
  stepper.advance(out, rng);
  return out;
}

ProbeObservables::ProbeObservables(const AnnulusGrid& g) {
  const int nt = g.ntheta();
  theta_index = {0, nt / 4, nt / 2, (3 * nt) / 4};
}

Eigen::VectorXd ProbeObservables::linear(const StateVector& s) const {
  Eigen::VectorXd o(n_linear);
  for (int k = 0; k < 4; ++k) {
    o[k] = s.v()[theta_index[k]];
    o[4 + k] = s.vt()[theta_index[k]];
  }
  return o;
}

Eigen::MatrixXd ProbeObservables::functionals(const AnnulusGrid& g) const {
  const int ni = g.n_interior(), half = ni + g.n_boundary();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n_linear, 2 * half);
  for (int k = 0; k < 4; ++k) {
    f(k, ni + theta_index[k]) = 1;
    f(4 + k, half + ni + theta_index[k]) = 1;
  }
  return f;
}

EnsembleResult run_ensemble(const StochasticStepper& stepper, const StateVector& s0,
                            const EnsembleOptions& opt) {
  const ForwardSolver& fw = stepper.deterministic();
  const PhysicalParams& p = fw.propagator().params();
  const AnnulusGrid& g = fw.propagator().grid();
  if (!s0.matches(g)) throw DimensionError("initial state does not match the grid");
  if (opt.n_paths < 1) throw ConfigError("n_paths must be >= 1", "noise.n_paths");
  if (opt.n_steps < 0) throw ConfigError("n_steps must be >= 0", "noise.T_final");

  std::vector<int> steps{0};
  for (int c : opt.checkpoints) {
    if (c < 0 || c > opt.n_steps) throw ConfigError("checkpoint outside the run", "noise.n_checkpoints");
    if (c > steps.back()) steps.push_back(c);
  }
  const int nc = static_cast<int>(steps.size());
  const ProbeObservables probes(g);
  const double hooke0 = hooke_invariant(s0, p, g);

  EnsembleResult res;
  for (int c : steps) res.times.push_back(c * stepper.dt());
  res.observables.assign(nc, Eigen::MatrixXd(opt.n_paths, ProbeObservables::n_linear + 1));
  std::vector<Eigen::VectorXd> drift(nc, Eigen::VectorXd::Zero(opt.n_paths));

  const int n_chunks = (opt.n_paths + path_chunk - 1) / path_chunk;
  std::vector<Eigen::MatrixXd> chunk_sum(n_chunks);
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (int chunk = next++; chunk < n_chunks; chunk = next++) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(s0.size(), nc);
      const int first = chunk * path_chunk;
      const int last = std::min(opt.n_paths, first + path_chunk);
      for (int path = first; path < last; ++path) {
        PathRng rng(opt.seed, static_cast<std::uint64_t>(path), opt.stream);
        StateVector s = s0;
        int n = 0;
        for (int c = 0; c < nc; ++c) {
          for (; n < steps[c]; ++n) stepper.advance(s, rng);
          res.observables[c].row(path).head(ProbeObservables::n_linear) =
              probes.linear(s).transpose();
          res.observables[c](path, ProbeObservables::n_linear) = energy(s, p, g).total;
          drift[c][path] = std::abs(hooke_invariant(s, p, g) - hooke0);
          sum.col(c) += s.data();
        }
      }
      chunk_sum[chunk] = std::move(sum);
    }
  };

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, n_chunks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  res.mean_state = Eigen::MatrixXd::Zero(s0.size(), nc);
  for (const auto& s : chunk_sum) res.mean_state += s;
  res.mean_state /= opt.n_paths;
  for (int c = 0; c < nc; ++c) {
    res.mean_norm_sq.push_back(2.0 * res.observables[c].col(ProbeObservables::n_linear).mean());
    res.max_hooke_drift.push_back(drift[c].maxCoeff());
  }
  return res;
}

Eigen::MatrixXd LyapunovSolution::project(const Eigen::MatrixXd& functionals) const {
  const Eigen::MatrixXd fe = functionals * basis;
  return fe * covariance * fe.transpose();
}

Eigen::MatrixXd LyapunovSolution::transient(double t) const {
  const int n = static_cast<int>(std::lround(t / dt));
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(step.rows(), step.cols());
  Eigen::MatrixXd a = step;
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) s = a * s;
    a = a * a;
  }
  return covariance - s * covariance * s.transpose();
}

LyapunovSolution stationary_covariance_oracle(const PhysicalParams& p, const AnnulusGrid& g,
                                              const NoiseModel& nm, double dt) {
  if (!(dt > 0)) throw ConfigError("dt must be > 0", "noise.dt");
  LyapunovSolution sol;
  sol.dt = dt;
  sol.basis = constrained_basis(p, g);
  const Eigen::MatrixXd& e = sol.basis;
  const SparseMatrix m = metric_matrix(p, g);
  const Eigen::Index k = e.cols();

  Eigen::MatrixXd ae(e.rows(), k);
  StateVector x(g);
  for (Eigen::Index j = 0; j < k; ++j) {
    x.data() = e.col(j);
    ae.col(j) = apply_generator(x, p, g).data();
  }
  const Eigen::MatrixXd emt = (m * e).transpose();
  sol.generator = emt * ae;

  const NoiseBasis nb(nm, g);
  Eigen::MatrixXd bq = Eigen::MatrixXd::Zero(e.rows(), nb.size());
  for (int b = 0; b < nb.size(); ++b)
    bq.col(b).tail(g.n_boundary()) = std::sqrt(nb.variance()[b]) / p.m() * nb.modes().col(b);
  sol.noise = emt * bq;

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(id - 0.5 * dt * sol.generator);
  sol.step = lu.solve(id + 0.5 * dt * sol.generator);
  const Eigen::MatrixXd rb = lu.solve(sol.noise);
  Eigen::MatrixXd pk = dt * rb * rb.transpose();
  Eigen::MatrixXd a = sol.step;
  constexpr int max_doublings = 64;
  for (;;) {
    const Eigen::MatrixXd inc = a * pk * a.transpose();
    pk += inc;
    a = a * a;
    ++sol.doublings;
    const double scale = pk.norm();
    if (inc.norm() <= 1e-16 * scale && a.norm() < 1e-8) break;
    if (sol.doublings >= max_doublings || !std::isfinite(scale))
      throw SolverError("stationary covariance did not converge (undamped mode?)", sol.doublings);
  }
  sol.covariance = 0.5 * (pk + pk.transpose());
  const double pn = sol.covariance.norm();
  sol.symmetry = (pk - pk.transpose()).norm() / std::max(pn, 1e-300);
  const Eigen::MatrixXd r = sol.generator * sol.covariance +
                            sol.covariance * sol.generator.transpose() +
                            sol.noise * sol.noise.transpose();
  sol.residual = r.norm() / std::max(pn, 1e-300);
  return sol;
}

MomentBoundReport moment_bound_check(const EnsembleResult& ens, const LyapunovSolution& oracle,
                                     const PhysicalParams& p, const AnnulusGrid& g,
                                     const NoiseModel& nm) {
  if (ens.mean_norm_sq.empty()) throw DimensionError("ensemble has no checkpoints");
  MomentBoundReport r;
  r.initial_mean = ens.mean_norm_sq.front();
  r.sup_mean = *std::max_element(ens.mean_norm_sq.begin(), ens.mean_norm_sq.end());
  r.bound_const = oracle.trace();
  r.margin = r.initial_mean + r.bound_const - r.sup_mean;
  r.satisfied = r.margin >= 0;
  r.stationary_vt_sq = nm.trace(g) / (2 * p.d() * p.m());
  return r;
}

EnergyDistanceTest energy_distance_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                        int n_permutations, std::uint64_t seed) {
  if (x.cols() != y.cols()) throw DimensionError("samples have different dimensions");
  if (x.rows() < 2 || y.rows() < 2) throw DimensionError("energy distance needs two samples per side");
  if (n_permutations < 1) throw ConfigError("n_permutations must be >= 1", "noise.n_permutations");
  const Eigen::Index n = x.rows(), mm = y.rows(), total = n + mm, d = x.cols();

  Eigen::MatrixXd z(total, d);
  z << x, y;
  for (Eigen::Index c = 0; c < d; ++c) {
    const double mu = z.col(c).mean();
    const double sd = std::sqrt((z.col(c).array() - mu).square().sum() / (total - 1));
    z.col(c).array() -= mu;
    if (sd > 0) z.col(c) /= sd;
  }
  Eigen::MatrixXd dist(total, total);
  for (Eigen::Index i = 0; i < total; ++i) {
    dist(i, i) = 0;
    for (Eigen::Index j = 0; j < i; ++j) dist(i, j) = dist(j, i) = (z.row(i) - z.row(j)).norm();
  }
  const double all = dist.sum();
  const double nd = static_cast<double>(n), md = static_cast<double>(mm);

  auto statistic = [&](const std::vector<char>& in_x) {
    double sxx = 0, syy = 0;
    for (Eigen::Index j = 0; j < total; ++j) {
      const double* col = dist.col(j).data();
      double sx = 0, sy = 0;
      for (Eigen::Index i = 0; i < total; ++i) (in_x[i] ? sx : sy) += col[i];
      (in_x[j] ? sxx : syy) += in_x[j] ? sx : sy;
    }
    const double sxy = 0.5 * (all - sxx - syy);
    const double e = 2 * sxy / (nd * md) - sxx / (nd * nd) - syy / (md * md);
    return nd * md / (nd + md) * e;
  };

  std::vector<char> labels(total, 0);
  std::fill(labels.begin(), labels.begin() + n, 1);
  EnergyDistanceTest t;
  t.statistic = statistic(labels);
  std::mt19937_64 rng(seed);
  std::vector<double> perm(n_permutations);
  int exceed = 0;
  for (int b = 0; b < n_permutations; ++b) {
    std::shuffle(labels.begin(), labels.end(), rng);
    perm[b] = statistic(labels);
    if (perm[b] >= t.statistic) ++exceed;
  }
  std::sort(perm.begin(), perm.end());
  const auto q = static_cast<std::size_t>(std::ceil(0.95 * n_permutations)) - 1;
  t.critical_value = perm[std::min(q, perm.size() - 1)];
  t.p_value = (1.0 + exceed) / (1.0 + n_permutations);
  return t;
}

MixingReport mixing_experiment(const StateVector& s0_a, const StateVector& s0_b,
                               const StochasticStepper& stepper, const LyapunovSolution& oracle,
                               const MixingOptions& opt, const NoiseModel& nm) {
  if (!(opt.T_final > 0)) throw ConfigError("T_final must be > 0", "noise.T_final");
  if (opt.n_checkpoints < 1) throw ConfigError("n_checkpoints must be >= 1", "noise.n_checkpoints");
  const TimeGrid tg = TimeGrid::make(opt.T_final, stepper.dt());
  EnsembleOptions eo;
  eo.n_paths = opt.n_paths;
  eo.n_steps = tg.n_steps;
  eo.seed = nm.seed;
  eo.threads = opt.threads;
  for (int c = 1; c <= opt.n_checkpoints; ++c)
    eo.checkpoints.push_back(static_cast<int>(std::lround(static_cast<double>(c) * tg.n_steps / opt.n_checkpoints)));
  eo.stream = 1;
  const EnsembleResult a = run_ensemble(stepper, s0_a, eo);
  eo.stream = 2;
  const EnsembleResult b = run_ensemble(stepper, s0_b, eo);

  MixingReport r;
  for (std::size_t c = 1; c < a.times.size(); ++c) {
    const EnergyDistanceTest t = energy_distance_test(a.observables[c], b.observables[c],
                                                      opt.n_permutations, nm.seed + c);
    r.times.push_back(a.times[c]);
    r.dist_series.push_back(t.statistic);
    r.critical_values.push_back(t.critical_value);
  }
  r.merged = !r.dist_series.empty() && r.dist_series.back() < r.critical_values.back();

  const int nl = ProbeObservables::n_linear;
  Eigen::MatrixXd obs(2 * opt.n_paths, nl);
  obs << a.observables.back().leftCols(nl), b.observables.back().leftCols(nl);
  const Eigen::RowVectorXd mean = obs.colwise().mean();
  obs.rowwise() -= mean;
  const double nt = static_cast<double>(obs.rows());
  r.stationary_cov_mc = obs.transpose() * obs / (nt - 1);
  r.stationary_cov_oracle =
      oracle.project(ProbeObservables(stepper.deterministic().propagator().grid())
                         .functionals(stepper.deterministic().propagator().grid()));
  r.z_scores.resize(nl, nl);
  for (int i = 0; i < nl; ++i) {
    for (int j = 0; j < nl; ++j) {
      const Eigen::ArrayXd prod = obs.col(i).array() * obs.col(j).array();
      const double var = (prod - prod.mean()).square().sum() / (nt - 1);
      const double se = std::sqrt(var / nt);
      r.z_scores(i, j) = (r.stationary_cov_mc(i, j) - r.stationary_cov_oracle(i, j)) / se;
      r.max_abs_z = std::max(r.max_abs_z, std::abs(r.z_scores(i, j)));
    }
  }
  return r;
}

void write_distance_csv(std::ostream& os, const MixingReport& r) {
  CsvWriter w(os, {"checkpoint", "distance", "critical_value"});
  for (std::size_t c = 0; c < r.dist_series.size(); ++c)
    w.row({r.times[c], r.dist_series[c], r.critical_values[c]});
}

void write_covariance_csv(std::ostream& os, const MixingReport& r) {
  CsvWriter w(os, {"observable_i", "observable_j", "mc_cov", "oracle_cov", "z"});
  const auto n = r.z_scores.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      w.row({static_cast<double>(i), static_cast<double>(j), r.stationary_cov_mc(i, j),
             r.stationary_cov_oracle(i, j), r.z_scores(i, j)});
}

}  // namespace wavehum
