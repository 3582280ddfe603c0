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

#include <cmath>
#include <vector>

namespace wavehum {

enum class KrylovMethod { cg, cr };

struct KrylovOptions {
  double tol = 5e-3;
  int max_iter = 200;
  KrylovMethod method = KrylovMethod::cr;
};

struct KrylovResult {
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0;
  std::vector<double> history;  // relative residual before each iteration
};

/// Solves A x = b for a self-adjoint positive operator with respect to
/// `dot`, starting from x = 0. Stops when |r| <= tol |b|. `cg` is plain
/// conjugate gradients, `cr` the conjugate residual variant, which
/// minimises |r| over the Krylov space and so decreases it monotonically.
/// On a miss the iterate with the smallest residual is kept.
template <class V, class Op, class Dot>
KrylovResult krylov_solve(const Op& apply, const V& b, V& x, const Dot& dot,
                          const KrylovOptions& opt) {
  KrylovResult res;
  x = 0.0 * b;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    res.converged = true;
    res.history.push_back(0.0);
    return res;
  }
  V r = b, p = b;
  V best = x;
  double best_res = 1.0;
  auto record = [&](double rel) {
    res.history.push_back(rel);
    res.relative_residual = rel;
    return rel <= opt.tol;
  };

  if (opt.method == KrylovMethod::cg) {
    double rr = dot(r, r);
    while (!record(std::sqrt(rr) / bnorm) && res.iterations < opt.max_iter) {
      const V ap = apply(p);
      const double alpha = rr / dot(p, ap);
      x = x + alpha * p;
      r = r - alpha * ap;
      const double rr_new = dot(r, r);
      p = r + (rr_new / rr) * p;
      rr = rr_new;
      ++res.iterations;
      if (std::sqrt(rr) / bnorm < best_res) {
        best_res = std::sqrt(rr) / bnorm;
        best = x;
      }
    }
  } else {
    V ar = apply(r), ap = ar;
    double rar = dot(r, ar);
    while (!record(std::sqrt(dot(r, r)) / bnorm) && res.iterations < opt.max_iter) {
      const double alpha = rar / dot(ap, ap);
      x = x + alpha * p;
      r = r - alpha * ap;
      ++res.iterations;
      const double rel = std::sqrt(dot(r, r)) / bnorm;
      if (rel < best_res) {
        best_res = rel;
        best = x;
      }
      if (rel <= opt.tol) continue;
      ar = apply(r);
      const double rar_new = dot(r, ar);
      const double beta = rar_new / rar;
      rar = rar_new;
      p = r + beta * p;
      ap = ar + beta * ap;
    }
  }
  res.converged = res.relative_residual <= opt.tol;
  if (!res.converged && best_res < res.relative_residual) {
    x = best;
    res.relative_residual = best_res;
  }
  return res;
}

}  // namespace wavehum
