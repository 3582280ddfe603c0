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

#include <concepts>

#include <Eigen/Dense>

#include "wavehum/grid.hpp"

namespace wavehum {

/// Storage shared by forward and adjoint phase-space vectors. The layout is
/// [interior displacement | boundary displacement | interior velocity |
/// boundary velocity], so the first half is the configuration block and the
/// second half the velocity block of a second-order system.
class PhaseVector {
 public:
  PhaseVector() = default;
  PhaseVector(int n_interior, int n_boundary)
      : ni_(n_interior),
        nb_(n_boundary),
        data_(Eigen::VectorXd::Zero(2 * (n_interior + n_boundary))) {}
  explicit PhaseVector(const AnnulusGrid& g)
      : PhaseVector(g.n_interior(), g.n_boundary()) {}

  int n_interior() const { return ni_; }
  int n_boundary() const { return nb_; }
  int half() const { return ni_ + nb_; }
  Eigen::Index size() const { return data_.size(); }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  auto config() { return data_.head(half()); }
  auto config() const { return data_.head(half()); }
  auto velocity() { return data_.tail(half()); }
  auto velocity() const { return data_.tail(half()); }

  bool matches(const AnnulusGrid& g) const {
    return ni_ == g.n_interior() && nb_ == g.n_boundary();
  }

  /// Component k in layout order (0: interior, 1: boundary, 2: interior
  /// velocity, 3: boundary velocity).
  auto block(int k) { return data_.segment(offset(k), k % 2 ? nb_ : ni_); }
  auto block(int k) const {
    return data_.segment(offset(k), k % 2 ? nb_ : ni_);
  }

 private:
  int offset(int k) const { return (k / 2) * (ni_ + nb_) + (k % 2) * ni_; }

  int ni_ = 0;
  int nb_ = 0;
  Eigen::VectorXd data_;
};

/// Forward state (u, v, u_t, v_t): velocity potential, membrane displacement
/// and their time derivatives.
class StateVector : public PhaseVector {
 public:
  using PhaseVector::PhaseVector;

  auto u() { return block(0); }
  auto u() const { return block(0); }
  auto v() { return block(1); }
  auto v() const { return block(1); }
  auto ut() { return block(2); }
  auto ut() const { return block(2); }
  auto vt() { return block(3); }
  auto vt() const { return block(3); }
};

/// Adjoint state (phi, delta, phi_t, delta_t) of the backward system.
class AdjointState : public PhaseVector {
 public:
  using PhaseVector::PhaseVector;

  auto phi() { return block(0); }
  auto phi() const { return block(0); }
  auto delta() { return block(1); }
  auto delta() const { return block(1); }
  auto phit() { return block(2); }
  auto phit() const { return block(2); }
  auto deltat() { return block(3); }
  auto deltat() const { return block(3); }
};

template <class T>
concept PhaseLike = std::derived_from<T, PhaseVector>;

template <PhaseLike T>
T operator+(T a, const T& b) {
  a.data() += b.data();
  return a;
}

template <PhaseLike T>
T operator-(T a, const T& b) {
  a.data() -= b.data();
  return a;
}

template <PhaseLike T>
T operator*(double s, T a) {
  a.data() *= s;
  return a;
}

/// Reinterprets the components of one kind of phase vector as the other.
template <PhaseLike To, PhaseLike From>
To phase_cast(const From& x) {
  To out(x.n_interior(), x.n_boundary());
  out.data() = x.data();
  return out;
}

}  // namespace wavehum
