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

#include "wavehum/experiments.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wavehum/io.hpp"

namespace fs = std::filesystem;

namespace wavehum {

namespace {

std::ofstream open_output(const fs::path& out, const std::string& file) {
  fs::create_directories(out);
  std::ofstream os(out / file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (out / file).string());
  return os;
}

RunOutcome finish(Report report, std::vector<std::string> failures, const fs::path& out) {
  report.add("status", failures.empty() ? std::string("ok") : std::string("failed"));
  for (const auto& f : failures) report.add("failed_check", f);
  open_output(out, report.name() + "_report.txt") << report.str();
  return {std::move(report), std::move(failures)};
}

/// Low angular harmonics with normal coefficients in every block.
template <PhaseLike T>
T random_smooth(const AnnulusGrid& g, const PhysicalParams& p, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  T s(g);
  for (int blk = 0; blk < 4; ++blk) {
    auto b = s.block(blk);
    const bool interior = blk % 2 == 0;
    for (int j = 0; j < 3; ++j) {
      const double a = n01(rng), c = n01(rng);
      for (int i = 0; i < (interior ? g.nr() : 1); ++i) {
        const double r = interior ? g.radius(i) : g.r1();
        for (int k = 0; k < g.ntheta(); ++k) {
          const double th = g.theta(k);
          b[interior ? g.index(i, k) : k] += r * (a * std::cos(j * th) + c * std::sin(j * th));
        }
      }
    }
  }
  return project_constraints(s, p, g);
}

CheckResult check(std::string name, double value, double limit) {
  return {std::move(name), value, limit, std::isfinite(value) && value <= limit};
}

}  // namespace

Report::Report(std::string name, const ExperimentConfig& cfg)
    : name_(std::move(name)), config_(to_string(cfg)) {}

void Report::add(const std::string& key, double value) { entries_.emplace_back(key, format_number(value)); }
void Report::add(const std::string& key, int value) { entries_.emplace_back(key, std::to_string(value)); }
void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::add(const std::string& key, bool value) {
  entries_.emplace_back(key, value ? "true" : "false");
}

std::string Report::str() const {
  std::ostringstream os;
  os << "# wavehum " << name_ << "\n# config\n" << config_ << "# results\n";
  for (const auto& [k, v] : entries_) os << name_ << '.' << k << " = " << v << '\n';
  return os.str();
}

StateVector default_initial_state(const AnnulusGrid& g, const PhysicalParams& p, double amplitude) {
  StateVector s(g);
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.ntheta(); ++j) {
      const double r = g.radius(i), t = g.theta(j);
      const double x = r * std::cos(t) - 0.75, y = r * std::sin(t);
      s.u()[g.index(i, j)] = amplitude * std::exp(-(x * x + y * y) / 0.09);
    }
  for (int j = 0; j < g.ntheta(); ++j)
    s.v()[j] = 0.5 * amplitude * std::exp(-4 * (1 - std::cos(g.theta(j))));
  return project_constraints(s, p, g);
}

RunOutcome run_simulate(const ExperimentConfig& cfg, const fs::path& out) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.grid();
  const TimeGrid tg = TimeGrid::make(cfg.horizon.T, cfg.horizon.dt);
  const StateVector s0 = default_initial_state(g, p, cfg.initial.amplitude);
  const ForwardSolver fw(p, g, tg.dt);
  const SimulationResult r = fw.simulate(s0, ControlSignal(), tg.n_steps, cfg.outputs.decimation);
  {
    auto os = open_output(out, "ledger.csv");
    write_ledger_csv(os, r.trajectory, r.ledger);
  }
  const double e0 = r.ledger.energy.front();
  const double h0 = r.ledger.hooke.front();
  Report rep("simulate", cfg);
  rep.add("seed", std::to_string(cfg.noise.seed));
  rep.add("n_steps", tg.n_steps);
  rep.add("dt", tg.dt);
  rep.add("energy_initial", e0);
  rep.add("energy_final", r.ledger.energy.back());
  rep.add("dissipated", r.ledger.dissipated.back());
  rep.add("ledger_residual_rel", r.ledger.max_abs_residual() / e0);
  rep.add("hooke_drift", r.ledger.max_hooke_drift());
  std::vector<std::string> fail;
  if (!(r.ledger.max_abs_residual() <= 1e-9 * e0)) fail.push_back("ledger_residual");
  if (!(r.ledger.max_hooke_drift() <= 1e-10 * (1 + std::abs(h0)))) fail.push_back("hooke_drift");
  return finish(std::move(rep), std::move(fail), out);
}

RunOutcome run_adjoint(const ExperimentConfig& cfg, const fs::path& out) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.grid();
  const HumProblem hum(p, g, cfg.horizon.T, cfg.horizon.dt, parse_obs_norm(cfg.hum.obs_norm),
                       cfg.horizon.eps0);
  const AdjointState zT =
      phase_cast<AdjointState>(default_initial_state(g, p, cfg.initial.amplitude));
  const AdjointSolution sol =
      hum.backward().solve(zT, hum.time_grid().n_steps, cfg.outputs.decimation);
  {
    auto os = open_output(out, "observation.csv");
    write_observation_csv(os, sol.observation, hum.weights());
  }
  const auto& tr = sol.trajectory;
  const double et = tr.energy.back();
  double max_res = 0;
  bool monotone = true;
  for (std::size_t n = 0; n < tr.energy.size(); ++n) {
    max_res = std::max(max_res, std::abs(tr.residual[n]));
    if (tr.energy[n] > et * (1 + 1e-12)) monotone = false;
  }
  Report rep("adjoint", cfg);
  rep.add("seed", std::to_string(cfg.noise.seed));
  rep.add("obs_norm", std::string(to_string(hum.mode())));
  rep.add("energy_terminal", et);
  rep.add("energy_initial", tr.energy.front());
  rep.add("residual_rel", max_res / et);
  rep.add("energy_monotone", monotone);
  rep.add("observation_norm_sq", observation_norm_sq(sol.observation, hum.weights()));
  std::vector<std::string> fail;
  if (!(max_res <= 1e-9 * et)) fail.push_back("adjoint_residual");
  if (!monotone) fail.push_back("adjoint_energy_growth");
  return finish(std::move(rep), std::move(fail), out);
}

RunOutcome run_observability(const ExperimentConfig& cfg, const fs::path& out) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.observability_grid();
  const ObsNorm mode = parse_obs_norm(cfg.observability.obs_norm);
  Report rep("observability", cfg);
  rep.add("seed", std::to_string(cfg.noise.seed));
  rep.add("grid", std::to_string(g.nr()) + "x" + std::to_string(g.ntheta()));
  auto os = open_output(out, "observability.csv");
  CsvWriter w(os, {"T", "rayleigh_min", "ct_estimate", "ct_samples", "consistent", "weak"});
  std::vector<std::string> fail;
  for (double T : cfg.observability_horizons()) {
    const double eps0 = std::min(cfg.horizon.eps0, 0.25 * T);
    const HumProblem hum(p, g, T, cfg.horizon.dt, mode, eps0);
    const ObservabilityReport r =
        estimate_observability(hum, cfg.observability.n_samples, cfg.noise.seed);
    w.row({T, r.rayleigh_min, r.ct_estimate, r.ct_samples, r.consistent ? 1.0 : 0.0,
           r.weak ? 1.0 : 0.0});
    const std::string key = "T=" + format_number(T);
    rep.add(key + ".rayleigh_min", r.rayleigh_min);
    rep.add(key + ".ct_estimate", r.ct_estimate);
    rep.add(key + ".consistent", r.consistent);
    rep.add(key + ".weak", r.weak);
    rep.add(key + ".unobservable_mode", r.unobservable_mode);
    if (!r.consistent) fail.push_back("observability_consistency(T=" + format_number(T) + ")");
  }
  return finish(std::move(rep), std::move(fail), out);
}

RunOutcome run_hum(const ExperimentConfig& cfg, const fs::path& out) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.grid();
  const HumProblem hum(p, g, cfg.horizon.T, cfg.horizon.dt, parse_obs_norm(cfg.hum.obs_norm),
                       cfg.horizon.eps0);
  const StateVector s0 = default_initial_state(g, p, cfg.initial.amplitude);
  const MinimizeResult m = hum.minimize(s0, cfg.hum_options());
  Report rep("hum", cfg);
  rep.add("seed", std::to_string(cfg.noise.seed));
  rep.add("method", cfg.hum.method);
  rep.add("iterations", m.krylov.iterations);
  rep.add("converged", m.krylov.converged);
  rep.add("relative_residual", m.krylov.relative_residual);
  int sign = cfg.hum.sign_override;
  if (sign == 0) {
    const SignValidation sv = hum.validate_sign(s0, m.minimizer);
    sign = sv.sign;
    rep.add("sign_source", std::string("validated"));
    rep.add("ratio_plus", sv.ratio_plus);
    rep.add("ratio_minus", sv.ratio_minus);
  } else {
    rep.add("sign_source", std::string("override"));
  }
  rep.add("sign", sign);
  const ControlSignal f = hum.synthesize(m.minimizer, sign);
  const NullControlReport nc = hum.verify_null_control(s0, f);
  {
    auto os = open_output(out, "control.csv");
    write_control_csv(os, f);
  }
  rep.add("free_norm", nc.free_norm);
  rep.add("controlled_norm", nc.controlled_norm);
  rep.add("ratio", nc.ratio);
  std::vector<std::string> fail;
  if (!m.krylov.converged) fail.push_back("krylov_convergence");
  if (!(nc.ratio <= 0.01)) fail.push_back("null_control_ratio");
  return finish(std::move(rep), std::move(fail), out);
}

RunOutcome run_mixing(const ExperimentConfig& cfg, const fs::path& out) {
  if (cfg.noise.n_paths < 1000)
    throw ConfigError("the mixing experiment needs n_paths >= 1000", "noise.n_paths");
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.noise_grid();
  const NoiseModel nm = cfg.noise_model();
  const StochasticStepper st(p, g, cfg.noise.dt, nm);
  const LyapunovSolution oracle = stationary_covariance_oracle(p, g, nm, st.dt());
  MixingOptions mo;
  mo.T_final = cfg.noise.T_final;
  mo.n_checkpoints = cfg.noise.n_checkpoints;
  mo.n_paths = cfg.noise.n_paths;
  mo.n_permutations = cfg.noise.n_permutations;
  mo.threads = cfg.noise.threads;
  const StateVector a(g);
  const StateVector b = default_initial_state(g, p, cfg.initial.amplitude);
  const MixingReport r = mixing_experiment(a, b, st, oracle, mo, nm);
  {
    auto os = open_output(out, "mixing_distance.csv");
    write_distance_csv(os, r);
  }
  {
    auto os = open_output(out, "mixing_covariance.csv");
    write_covariance_csv(os, r);
  }
  Report rep("mixing", cfg);
  rep.add("seed", std::to_string(nm.seed));
  rep.add("distance_final", r.dist_series.back());
  rep.add("critical_final", r.critical_values.back());
  rep.add("merged", r.merged);
  rep.add("max_abs_z", r.max_abs_z);
  rep.add("lyapunov_residual", oracle.residual);
  std::vector<std::string> fail;
  if (!r.merged) fail.push_back("mixing_distance");
  if (!(r.max_abs_z <= 3)) fail.push_back("covariance_z_scores");
  return finish(std::move(rep), std::move(fail), out);
}

RunOutcome run_lyapunov(const ExperimentConfig& cfg, const fs::path& out) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.noise_grid();
  const NoiseModel nm = cfg.noise_model();
  const LyapunovSolution sol = stationary_covariance_oracle(p, g, nm, cfg.noise.dt);
  const ProbeObservables probes(g);
  const Eigen::MatrixXd cov = sol.project(probes.functionals(g));
  {
    auto os = open_output(out, "lyapunov.csv");
    CsvWriter w(os, {"observable_i", "observable_j", "covariance"});
    for (Eigen::Index i = 0; i < cov.rows(); ++i)
      for (Eigen::Index j = i; j < cov.cols(); ++j)
        w.row({static_cast<double>(i), static_cast<double>(j), cov(i, j)});
  }
  const Eigen::MatrixXd qt = sol.transient(cfg.horizon.T);
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (qt + qt.transpose())).eigenvalues();
  const double rank_ratio = ev.maxCoeff() > 0 ? ev.minCoeff() / ev.maxCoeff() : 0.0;
  Report rep("lyapunov", cfg);
  rep.add("seed", std::to_string(nm.seed));
  rep.add("dimension", static_cast<int>(sol.covariance.rows()));
  rep.add("doublings", sol.doublings);
  rep.add("residual", sol.residual);
  rep.add("symmetry", sol.symmetry);
  rep.add("bound_const", sol.trace());
  rep.add("noise_trace", nm.trace(g));
  rep.add("controllability_eig_ratio", rank_ratio);
  std::vector<std::string> fail;
  if (!(sol.residual <= 1e-10)) fail.push_back("lyapunov_residual");
  if (nm.q0 > 0 && !(rank_ratio > 1e-10)) fail.push_back("controllability_rank");
  return finish(std::move(rep), std::move(fail), out);
}

std::vector<CheckResult> invariant_checks(const ExperimentConfig& cfg) {
  const PhysicalParams p = cfg.params();
  const AnnulusGrid g = cfg.grid();
  std::mt19937_64 rng(cfg.noise.seed);
  std::vector<CheckResult> out;

  {
    const StateVector s = random_smooth<StateVector>(g, p, rng);
    const AdjointState z = random_smooth<AdjointState>(g, p, rng);
    const double ns = norm_sq(s, p, g), nz = norm_sq(z, p, g);
    out.push_back(check("dissipativity", std::abs(dissipativity_residual(s, p, g)) / ns, 1e-10));
    out.push_back(check("adjoint_dissipativity",
                        std::abs(adjoint_dissipativity_residual(z, p, g)) / nz, 1e-10));
  }

  const TimeGrid tg = TimeGrid::make(cfg.horizon.T, cfg.horizon.dt);
  const ForwardSolver fw(p, g, tg.dt);
  const StateVector s0 = default_initial_state(g, p, cfg.initial.amplitude);
  {
    const SimulationResult r = fw.simulate(s0, ControlSignal(), tg.n_steps, tg.n_steps);
    out.push_back(check("ledger_residual", r.ledger.max_abs_residual() / r.ledger.energy.front(), 1e-9));
    out.push_back(check("hooke_drift",
                        r.ledger.max_hooke_drift() / (1 + std::abs(r.ledger.hooke.front())), 1e-10));
  }
  const HumProblem hum(p, g, cfg.horizon.T, cfg.horizon.dt, parse_obs_norm(cfg.hum.obs_norm),
                       cfg.horizon.eps0);
  {
    const AdjointState zT = random_smooth<AdjointState>(g, p, rng);
    const AdjointSolution sol = hum.backward().solve(zT, tg.n_steps, tg.n_steps);
    const auto& e = sol.trajectory.energy;
    double res = 0, growth = 0;
    for (std::size_t n = 0; n < e.size(); ++n) {
      res = std::max(res, std::abs(sol.trajectory.residual[n]));
      growth = std::max(growth, e[n] - e.back());
    }
    out.push_back(check("adjoint_residual", res / e.back(), 1e-9));
    out.push_back(check("adjoint_energy_growth", growth / e.back(), 1e-12));

    std::normal_distribution<double> n01;
    Eigen::MatrixXd fv(tg.n_steps, g.ntheta());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv.data()[i] = n01(rng);
    const ControlSignal f(fv, tg.dt);
    const StateVector xT = fw.terminal(StateVector(g), f, tg.n_steps);
    const double lhs = inner_product(xT, zT, p, g);
    const double rhs = control_pairing(f, sol.observation, p);
    out.push_back(check("duality", std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)), 1e-8));
  }
  {
    const AdjointState z = random_smooth<AdjointState>(g, p, rng);
    const AdjointState w = random_smooth<AdjointState>(g, p, rng);
    const AdjointState gz = hum.gramian_apply(z), gw = hum.gramian_apply(w);
    const double a = hum.dot(gz, w), b = hum.dot(z, gw);
    out.push_back(check("gramian_symmetry", std::abs(a - b) / std::max(std::abs(a), std::abs(b)), 1e-10));
    const AdjointState grad = hum.j_gradient(z, s0);
    const double h = 1e-4 * std::sqrt(hum.dot(z, z) / hum.dot(w, w));
    const double fd = (hum.j_value(z + h * w, s0) - hum.j_value(z - (h * w), s0)) / (2 * h);
    const double an = hum.dot(grad, w);
    out.push_back(check("gradient_fd", std::abs(fd - an) / std::max(std::abs(fd), std::abs(an)), 1e-5));
  }
  {
    const AnnulusGrid ng = cfg.noise_grid();
    NoiseModel nm = cfg.noise_model();
    const LyapunovSolution sol = stationary_covariance_oracle(p, ng, nm, cfg.noise.dt);
    out.push_back(check("lyapunov_residual", sol.residual, 1e-10));
    const StateVector x0 = default_initial_state(ng, p, cfg.initial.amplitude);
    nm.q0 = 0;
    const StochasticStepper quiet(p, ng, cfg.noise.dt, nm);
    StateVector xs = x0;
    PathRng rng0(nm.seed, 0);
    for (int n = 0; n < 20; ++n) quiet.advance(xs, rng0);
    const StateVector xd = quiet.deterministic().terminal(x0, ControlSignal(), 20);
    out.push_back(check("zero_noise_reduction", (xs.data() - xd.data()).cwiseAbs().maxCoeff(), 0.0));

    const StochasticStepper st(p, ng, cfg.noise.dt, cfg.noise_model());
    EnsembleOptions eo;
    eo.n_paths = 40;
    eo.n_steps = 20;
    eo.checkpoints = {20};
    eo.seed = nm.seed;
    eo.threads = 1;
    const EnsembleResult e1 = run_ensemble(st, x0, eo);
    eo.threads = 2;
    const EnsembleResult e2 = run_ensemble(st, x0, eo);
    out.push_back(check("ensemble_determinism",
                        (e1.observables.back() - e2.observables.back()).cwiseAbs().maxCoeff(), 0.0));
  }
  return out;
}

RunOutcome run_checks(const ExperimentConfig& cfg, const fs::path& out) {
  const std::vector<CheckResult> checks = invariant_checks(cfg);
  Report rep("checks", cfg);
  rep.add("seed", std::to_string(cfg.noise.seed));
  std::vector<std::string> fail;
  {
    auto os = open_output(out, "checks.csv");
    os << "check,value,limit,passed\n";
    for (const auto& c : checks) {
      os << c.name << ',' << format_number(c.value) << ',' << format_number(c.limit) << ','
         << (c.passed ? 1 : 0) << '\n';
      rep.add(c.name, c.value);
      if (!c.passed) fail.push_back(c.name);
    }
  }
  return finish(std::move(rep), std::move(fail), out);
}

}  // namespace wavehum
