// Copyright 2026 The z2stab Authors
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
//
// Dense statevector with in-place gate application and projective
// measurement, used by the stochastic circuit simulator.

#pragma once

#include <cmath>
#include <stdexcept>

#include "z2stab/common.hpp"

namespace z2stab {

/// Pure state on n qubits. Qubit 0 is the leftmost tensor factor (most
/// significant bit of the basis index), matching the operator embedding
/// convention, so qubit q owns bit (n-1-q).
class Statevector {
 public:
  explicit Statevector(int n_qubits) : n_(check_qubits(n_qubits)) {
    amps_ = DVec::Zero(Eigen::Index(1) << n_);
    amps_(0) = 1.0;
  }

  Statevector(int n_qubits, DVec amps) : n_(check_qubits(n_qubits)), amps_(std::move(amps)) {
    if (amps_.size() != Eigen::Index(1) << n_)
      throw std::invalid_argument("Statevector: amplitude count does not match qubit count");
  }

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return amps_.size(); }
  const DVec& amplitudes() const { return amps_; }
  double norm_error() const { return std::abs(amps_.norm() - 1.0); }

  void apply_1q(int q, const Eigen::Matrix2cd& u) {
    const Eigen::Index mask = bit(q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      if (i & mask) continue;
      const cplx a0 = amps_(i);
      const cplx a1 = amps_(i | mask);
      amps_(i) = u(0, 0) * a0 + u(0, 1) * a1;
      amps_(i | mask) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }

  void apply_x(int q) {
    const Eigen::Index mask = bit(q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i)
      if (!(i & mask)) std::swap(amps_(i), amps_(i | mask));
  }

  void apply_z(int q) {
    const Eigen::Index mask = bit(q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i)
      if (i & mask) amps_(i) = -amps_(i);
  }

  void apply_h(int q) {
    static const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd u;
    u << r, r, r, -r;
    apply_1q(q, u);
  }

  void apply_s(int q) { apply_phase(q, cplx(0, 1)); }
  void apply_sdg(int q) { apply_phase(q, cplx(0, -1)); }

  /// exp(-i theta Z / 2).
  void apply_rz(int q, double theta) {
    const cplx e0 = std::exp(cplx(0, -0.5 * theta));
    const cplx e1 = std::exp(cplx(0, 0.5 * theta));
    const Eigen::Index mask = bit(q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i) amps_(i) *= (i & mask) ? e1 : e0;
  }

  /// exp(-i theta X / 2).
  void apply_rx(int q, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    Eigen::Matrix2cd u;
    u << cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0);
    apply_1q(q, u);
  }

  void apply_cnot(int control, int target) {
    if (control == target) throw std::invalid_argument("Statevector: CNOT control equals target");
    const Eigen::Index cm = bit(control);
    const Eigen::Index tm = bit(target);
    for (Eigen::Index i = 0; i < amps_.size(); ++i)
      if ((i & cm) && !(i & tm)) std::swap(amps_(i), amps_(i | tm));
  }

  double prob_one(int q) const {
    const Eigen::Index mask = bit(q);
    double s1 = 0, total = 0;
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      const double w = std::norm(amps_(i));
      total += w;
      if (i & mask) s1 += w;
    }
    return total > 0 ? s1 / total : 0.0;
  }

  /// Projective measurement: u in [0,1) selects the branch, state collapses
  /// and is renormalized. Returns the observed bit.
  int measure(int q, double u) {
    const int outcome = u < prob_one(q) ? 1 : 0;
    collapse(q, outcome);
    return outcome;
  }

  /// Project onto the given outcome; throws when the branch has no weight.
  void collapse(int q, int outcome) {
    const Eigen::Index mask = bit(q);
    double w = 0;
    for (Eigen::Index i = 0; i < amps_.size(); ++i)
      if (((i & mask) != 0) == (outcome != 0)) w += std::norm(amps_(i));
    if (w < 1e-300) throw std::runtime_error("Statevector: collapse onto zero-weight branch");
    const double scale = 1.0 / std::sqrt(w);
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      if (((i & mask) != 0) == (outcome != 0))
        amps_(i) *= scale;
      else
        amps_(i) = 0;
    }
  }

  /// Measure and flip to |0> when the outcome was |1>.
  void reset(int q, double u) {
    if (measure(q, u) == 1) apply_x(q);
  }

 private:
  static int check_qubits(int n) {
    if (n < 1) throw std::invalid_argument("Statevector: need at least one qubit");
    if (n > 26) throw ResourceLimitError("Statevector: register too large for dense amplitudes");
    return n;
  }

  Eigen::Index bit(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("Statevector: qubit index out of range");
    return Eigen::Index(1) << (n_ - 1 - q);
  }

  void apply_phase(int q, cplx phase) {
    const Eigen::Index mask = bit(q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i)
      if (i & mask) amps_(i) *= phase;
  }

  int n_;
  DVec amps_;
};

}  // namespace z2stab
