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

#include "wavehum/hum.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "wavehum/io.hpp"

namespace wavehum {

CutoffProfile::CutoffProfile(double T, double dt, double eps0)
    : grid_(TimeGrid::make(T, dt)), eps0_(eps0) {
  if (!(eps0 > 0 && eps0 < 0.5 * T))
    throw ConfigError("eps0 must lie in (0, T/2)", "horizon.eps0");
  samples_.resize(grid_.n_steps + 1);
  for (int n = 0; n <= grid_.n_steps; ++n) samples_[n] = value(grid_.time(n));
}

double CutoffProfile::smooth_step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double CutoffProfile::value(double t) const {
  return smooth_step(t / eps0_) * smooth_step((T() - t) / eps0_);
}

CutoffProfile make_cutoff(double T, double dt, double eps0) {
  return CutoffProfile(T, dt, eps0);
}

ObsNorm parse_obs_norm(const std::string& s) {
  if (s == "plain") return ObsNorm::plain;
  if (s == "cutoff") return ObsNorm::cutoff;
  throw ConfigError("obs_norm must be plain or cutoff", "hum.obs_norm");
}

const char* to_string(ObsNorm m) { return m == ObsNorm::plain ? "plain" : "cutoff"; }

HumProblem::HumProblem(const PhysicalParams& p, const AnnulusGrid& g, double T,
                       double dt, ObsNorm mode, double eps0)
    : params_(p),
      grid_(g),
      tg_(TimeGrid::make(T, dt)),
      mode_(mode),
      // the window only enters in cutoff mode; plain mode accepts any horizon
      cutoff_(T, dt, mode == ObsNorm::cutoff ? eps0 : std::min(eps0, 0.25 * T)),
      forward_(p, g, tg_.dt),
      backward_(p, g, tg_.dt) {
  if (mode == ObsNorm::cutoff)
    chi_ = cutoff_.samples().array().square();
  else
    chi_ = Eigen::VectorXd::Ones(tg_.n_steps + 1);
}

ObservationRecord HumProblem::observe(const AdjointState& z, AdjointState* initial) const {
  return backward_.observe(z, tg_.n_steps, initial);
}

double HumProblem::quadratic_form(const AdjointState& z) const {
  return observation_norm_sq(observe(z), chi_);
}

ControlSignal HumProblem::raw_control(const ObservationRecord& obs) const {
  const int n = obs.n_steps(), nb = static_cast<int>(obs.deltat.cols());
  if (n != tg_.n_steps) throw DimensionError("observation on another step grid");
  Eigen::MatrixXd gk = Eigen::MatrixXd::Zero(n + 1, nb);
  for (int k = 1; k < n; ++k) gk.row(k) = chi_[k] * obs.deltatt.row(k);
  const double h = tg_.dt;
  Eigen::MatrixXd f = (obs.deltat_mid - (gk.bottomRows(n) - gk.topRows(n)) / h) / params_.c2();
  return ControlSignal(std::move(f), h);
}

ControlSignal HumProblem::synthesize(const AdjointState& z, int sign) const {
  ControlSignal f = raw_control(observe(z));
  f *= static_cast<double>(sign);
  return f;
}

AdjointState HumProblem::gramian_apply(const AdjointState& z) const {
  const ControlSignal f = raw_control(observe(z));
  const StateVector xT = forward_.terminal(StateVector(grid_), f, tg_.n_steps);
  return phase_cast<AdjointState>((-params_.rho() * params_.c2()) * xT);
}

double HumProblem::linear_term(const StateVector& s0, const AdjointState& z0,
                               const BoundaryField& deltatt0) const {
  const PhysicalParams& p = params_;
  const AnnulusGrid& g = grid_;
  const auto& w = g.cell_weights();
  const double beta = g.arc_weight(), rho = p.rho(), c2 = p.c2();
  const InteriorField phitt = c2 * laplacian(z0.phi(), z0.deltat(), g);
  const BoundaryField u1 = trace_gamma1(s0.u(), g);
  const BoundaryField phit1 = trace_gamma1(z0.phit(), g);
  const double t1 = rho * w.dot(s0.ut().cwiseProduct(z0.phit()));
  const double t2 = p.m() * c2 * beta * s0.vt().dot(z0.deltat());
  const double t3 = -rho * w.dot(s0.u().cwiseProduct(phitt));
  const double t4 = -rho * c2 * beta * s0.v().dot(phit1);
  const double t5 = rho * c2 * beta * u1.dot(z0.deltat());
  const double t6 = c2 * p.d() * beta * s0.v().dot(z0.deltat());
  const double t7 = -p.m() * c2 * beta * s0.v().dot(deltatt0);
  return t1 + t2 + t3 + t4 + t5 + t6 + t7;
}

AdjointState HumProblem::linear_representative(const StateVector& s0) const {
  const StateVector xT = forward_.terminal(s0, {}, tg_.n_steps);
  return phase_cast<AdjointState>((params_.rho() * params_.c2()) * xT);
}

double HumProblem::j_value(const AdjointState& z, const StateVector& s0) const {
  AdjointState z0;
  const ObservationRecord obs = observe(z, &z0);
  return 0.5 * observation_norm_sq(obs, chi_) +
         linear_term(s0, z0, obs.deltatt.row(0).transpose());
}

AdjointState HumProblem::j_gradient(const AdjointState& z, const StateVector& s0) const {
  return gramian_apply(z) + linear_representative(s0);
}

MinimizeResult HumProblem::minimize(const StateVector& s0, const HumOptions& opt) const {
  if (opt.tikhonov < 0) throw ConfigError("tikhonov must be >= 0", "hum.tikhonov");
  const AdjointState rhs = -1.0 * linear_representative(s0);
  MinimizeResult out;
  out.tikhonov = opt.tikhonov;
  auto apply = [&](const AdjointState& v) {
    AdjointState gv = gramian_apply(v);
    if (opt.tikhonov != 0) gv.data() += opt.tikhonov * v.data();
    return gv;
  };
  auto dot = [&](const AdjointState& a, const AdjointState& b) { return this->dot(a, b); };
  out.krylov = krylov_solve(apply, rhs, out.minimizer, dot, opt.krylov);
  return out;
}

NullControlReport HumProblem::verify_null_control(const StateVector& s0,
                                                  const ControlSignal& f) const {
  NullControlReport r;
  r.free_norm = std::sqrt(norm_sq(forward_.terminal(s0, {}, tg_.n_steps), params_, grid_));
  r.controlled_norm = std::sqrt(norm_sq(forward_.terminal(s0, f, tg_.n_steps), params_, grid_));
  r.ratio = r.free_norm > 0 ? r.controlled_norm / r.free_norm : 0.0;
  return r;
}

SignValidation HumProblem::validate_sign(const StateVector& s0,
                                         const AdjointState& zhat) const {
  const ControlSignal raw = raw_control(observe(zhat));
  SignValidation v;
  v.ratio_plus = verify_null_control(s0, raw).ratio;
  v.ratio_minus = verify_null_control(s0, -1.0 * raw).ratio;
  v.sign = v.ratio_minus <= v.ratio_plus ? -1 : +1;
  return v;
}

AdjointState gramian_apply(const AdjointState& z, double T, double dt,
                           const PhysicalParams& p, const AnnulusGrid& g,
                           const CutoffProfile& cutoff) {
  return HumProblem(p, g, T, dt, ObsNorm::cutoff, cutoff.eps0()).gramian_apply(z);
}

double j_value(const AdjointState& z, const StateVector& s0, double T, double dt,
               const PhysicalParams& p, const AnnulusGrid& g,
               const CutoffProfile& cutoff) {
  return HumProblem(p, g, T, dt, ObsNorm::cutoff, cutoff.eps0()).j_value(z, s0);
}

AdjointState j_gradient(const AdjointState& z, const StateVector& s0, double T,
                        double dt, const PhysicalParams& p, const AnnulusGrid& g,
                        const CutoffProfile& cutoff) {
  return HumProblem(p, g, T, dt, ObsNorm::cutoff, cutoff.eps0()).j_gradient(z, s0);
}

MinimizeResult minimize_j(const StateVector& s0, double T, double dt,
                          const PhysicalParams& p, const AnnulusGrid& g,
                          const CutoffProfile& cutoff, const HumOptions& opt) {
  return HumProblem(p, g, T, dt, ObsNorm::cutoff, cutoff.eps0()).minimize(s0, opt);
}

ControlSignal synthesize_control(const ObservationRecord& obs,
                                 const CutoffProfile& cutoff,
                                 const PhysicalParams& p, int sign) {
  const int n = obs.n_steps(), nb = static_cast<int>(obs.deltat.cols());
  if (cutoff.time_grid().n_steps != n)
    throw DimensionError("cut-off and observation on different step grids");
  Eigen::MatrixXd gk = Eigen::MatrixXd::Zero(n + 1, nb);
  const auto& z = cutoff.samples();
  for (int k = 1; k < n; ++k) gk.row(k) = z[k] * z[k] * obs.deltatt.row(k);
  Eigen::MatrixXd f =
      (sign / p.c2()) * (obs.deltat_mid - (gk.bottomRows(n) - gk.topRows(n)) / obs.dt);
  return ControlSignal(std::move(f), obs.dt);
}

NullControlReport verify_null_control(const StateVector& s0, const ControlSignal& f,
                                      double T, double dt, const PhysicalParams& p,
                                      const AnnulusGrid& g) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  if (!f.empty() && f.n_steps() != tg.n_steps)
    throw DimensionError("control does not cover the step grid of [0, T]");
  const ForwardSolver fs(p, g, tg.dt);
  NullControlReport r;
  r.free_norm = std::sqrt(norm_sq(fs.terminal(s0, {}, tg.n_steps), p, g));
  r.controlled_norm = std::sqrt(norm_sq(fs.terminal(s0, f, tg.n_steps), p, g));
  r.ratio = r.free_norm > 0 ? r.controlled_norm / r.free_norm : 0.0;
  return r;
}

ExactControlResult exact_control(const HumProblem& hum, const StateVector& s0,
                                 const StateVector& s1, const ControlSignal& probe,
                                 const HumOptions& opt, int sign) {
  const int n = hum.time_grid().n_steps;
  ExactControlResult r;
  r.target = hum.forward().terminal(s1, probe, n);
  r.solve = hum.minimize(s0 - s1, opt);
  r.control = hum.synthesize(r.solve.minimizer, sign);
  if (!probe.empty()) r.control += probe;
  r.reached = hum.forward().terminal(s0, r.control, n);
  const double tnorm = std::sqrt(norm_sq(r.target, hum.params(), hum.grid()));
  const double err = std::sqrt(norm_sq(r.reached - r.target, hum.params(), hum.grid()));
  r.relative_error = tnorm > 0 ? err / tnorm : err;
  return r;
}

Eigen::MatrixXd constrained_basis(const PhysicalParams& p, const AnnulusGrid& g) {
  const int ni = g.n_interior(), nb = g.n_boundary(), half = ni + nb, n = 2 * half;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, 2);
  c.col(0).head(ni) = g.cell_weights();
  c.col(1).segment(half, ni) = p.rho() * g.cell_weights();
  c.col(1).segment(ni, nb).setConstant(-g.arc_weight() / p.kappa());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b = q.rightCols(n - 2);
  const Eigen::MatrixXd m = metric_matrix(p, g) * b;
  const Eigen::MatrixXd k = b.transpose() * m;
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (k + k.transpose()));
  if (llt.info() != Eigen::Success)
    throw ConfigError("phase-space form is not a norm on the constrained space (k = sigma = 0?)",
                      "physics.k");
  const Eigen::MatrixXd lower = llt.matrixL();
  return lower.triangularView<Eigen::Lower>().solve(b.transpose()).transpose();
}

Eigen::MatrixXd dense_gramian(const HumProblem& hum, const Eigen::MatrixXd& basis) {
  const SparseMatrix m = metric_matrix(hum.params(), hum.grid());
  const Eigen::Index k = basis.cols();
  Eigen::MatrixXd gz(basis.rows(), k);
  AdjointState z(hum.grid());
  for (Eigen::Index j = 0; j < k; ++j) {
    z.data() = basis.col(j);
    gz.col(j) = hum.gramian_apply(z).data();
  }
  const Eigen::MatrixXd gd = basis.transpose() * (m * gz);
  return 0.5 * (gd + gd.transpose());
}

ObservabilityReport estimate_observability(const HumProblem& hum, int n_samples,
                                           std::uint64_t seed, int inverse_iterations) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1", "observability.n_samples");
  const Eigen::MatrixXd e = constrained_basis(hum.params(), hum.grid());
  const Eigen::MatrixXd gd = dense_gramian(hum, e);
  const Eigen::Index k = gd.rows();
  const double scale = gd.diagonal().cwiseAbs().maxCoeff();

  ObservabilityReport rep;
  rep.T = hum.time_grid().T();
  rep.mode = hum.mode();
  rep.sample_count = n_samples;
  rep.inverse_iterations = inverse_iterations;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  auto random_unit = [&]() {
    Eigen::VectorXd c(k);
    for (Eigen::Index i = 0; i < k; ++i) c[i] = n01(rng);
    return Eigen::VectorXd(c / c.norm());
  };

  // Inverse power iteration on the dense Gramian.
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gd);
  Eigen::VectorXd x = random_unit();
  for (int it = 0; it < inverse_iterations; ++it) {
    Eigen::VectorXd y = ldlt.solve(x);
    if (!y.allFinite() || y.norm() == 0) break;
    x = y / y.norm();
  }
  rep.rayleigh_min = std::max(0.0, x.dot(gd * x));

  AdjointState z(hum.grid());
  auto check_mode = [&](const Eigen::VectorXd& c, double obs) {
    if (obs <= 1e-14 * scale && !rep.unobservable_mode) {
      rep.unobservable_mode = true;
      z.data() = e * c;
      rep.offending = z;
    }
  };
  check_mode(x, rep.rayleigh_min);
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd c = random_unit();
    z.data() = e * c;
    const double obs = hum.quadratic_form(z);
    check_mode(c, obs);
    const double norm = norm_sq(z, hum.params(), hum.grid());
    rep.ct_samples = std::max(rep.ct_samples, obs > 0 ? norm / obs : INFINITY);
  }
  rep.ct_estimate = std::max(rep.ct_samples,
                             rep.rayleigh_min > 0 ? 1.0 / rep.rayleigh_min : INFINITY);
  const double prod = rep.ct_estimate * rep.rayleigh_min;
  rep.consistent = std::isfinite(prod) && prod >= 1.0 - 1e-9 && prod <= 1.05;
  rep.weak = rep.rayleigh_min < 1e-8;
  return rep;
}

ObservabilityReport estimate_observability(double T, double dt, const PhysicalParams& p,
                                           const AnnulusGrid& g, int n_samples,
                                           ObsNorm mode, double eps0, std::uint64_t seed) {
  return estimate_observability(HumProblem(p, g, T, dt, mode, eps0), n_samples, seed);
}

void write_control_csv(std::ostream& os, const ControlSignal& f) {
  CsvWriter csv(os, {"t", "theta_index", "f"});
  for (int n = 0; n < f.n_steps(); ++n)
    for (int j = 0; j < f.n_boundary(); ++j)
      csv.row({(n + 0.5) * f.dt(), static_cast<double>(j), f.values()(n, j)});
}

ControlSignal read_control_csv(std::istream& is, double dt) {
  std::string line;
  if (!std::getline(is, line) || line != "t,theta_index,f")
    throw ConfigError("control CSV must start with the header t,theta_index,f", "control", 1);
  std::vector<std::pair<int, double>> rows;
  int max_j = -1, lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
      throw ConfigError("control CSV row needs three fields", "control", lineno);
    try {
      const int j = std::stoi(b);
      rows.emplace_back(j, std::stod(c));
      max_j = std::max(max_j, j);
    } catch (const std::exception&) {
      throw ConfigError("unparseable number in control CSV", "control", lineno);
    }
  }
  const int nb = max_j + 1;
  if (nb == 0 || rows.size() % nb != 0)
    throw ConfigError("control CSV does not describe a full step grid", "control", lineno);
  const int n = static_cast<int>(rows.size()) / nb;
  Eigen::MatrixXd v(n, nb);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<int>(i % nb))
      throw ConfigError("control CSV rows out of order", "control", static_cast<int>(i) + 2);
    v(i / nb, i % nb) = rows[i].second;
  }
  return ControlSignal(std::move(v), dt);
}

}  // namespace wavehum
