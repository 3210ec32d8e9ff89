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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "z2stab/common.hpp"

namespace z2stab {

/// Maps N matter sites and N links of a periodic chain onto 2N qubits.
/// Matter site j lives on qubit 2j, the link (j, j+1 mod N) on qubit 2j+1.
/// Qubit 0 is the leftmost tensor factor (most significant bit of a basis
/// index). Site indices are 0-based and wrap modulo N.
class RegisterLayout {
 public:
  explicit RegisterLayout(int n_matter) : n_matter_(n_matter) {
    if (n_matter < 1) throw std::invalid_argument("RegisterLayout: need at least one site");
    if (n_matter > 15) throw ResourceLimitError("RegisterLayout: register too large for dense simulation");
  }

  int n_matter() const { return n_matter_; }
  int n_qubits() const { return 2 * n_matter_; }
  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits(); }

  /// Wraps any integer site index into {0..N-1}.
  int wrap(int j) const {
    int m = j % n_matter_;
    return m < 0 ? m + n_matter_ : m;
  }

  int matter_qubit(int j) const { return 2 * wrap(j); }
  /// Qubit of the link between sites j and j+1; link(-1) is the wrap-around
  /// link (N-1, 0) on qubit 2N-1.
  int link_qubit(int j) const { return 2 * wrap(j) + 1; }

 private:
  int n_matter_;
};

/// Single-qubit factors available for embedding. Plus = (X + iY)/2,
/// Minus = (X - iY)/2; with Z|0> = +|0> these are |0><1| and |1><0|.
enum class Pauli { I, X, Y, Z, Plus, Minus };

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (p) {
    case Pauli::I: m(0, 0) = 1; m(1, 1) = 1; break;
    case Pauli::X: m(0, 1) = 1; m(1, 0) = 1; break;
    case Pauli::Y: m(0, 1) = -kImag; m(1, 0) = kImag; break;
    case Pauli::Z: m(0, 0) = 1; m(1, 1) = -1; break;
    case Pauli::Plus: m(0, 1) = 1; break;
    case Pauli::Minus: m(1, 0) = 1; break;
  }
  return m;
}

/// Sparse operator on the full register, with an optional label used when
/// reporting jump-operator sets. Immutable in practice: arithmetic returns
/// new values.
class Operator {
 public:
  Operator() = default;
  explicit Operator(SpMat m, std::string label = "")
      : mat_(std::move(m)), label_(std::move(label)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("Operator: matrix not square");
  }

  const SpMat& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  const std::string& label() const { return label_; }
  Operator relabel(std::string label) const { return Operator(mat_, std::move(label)); }

  Operator dagger() const { return Operator(SpMat(mat_.adjoint()), label_); }
  bool is_hermitian(double tol = 1e-12) const { return max_abs(SpMat(mat_ - SpMat(mat_.adjoint()))) < tol; }
  DMat dense() const { return DMat(mat_); }

  friend Operator operator+(const Operator& a, const Operator& b) {
    check_dims(a, b);
    return Operator(SpMat(a.mat_ + b.mat_));
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    check_dims(a, b);
    return Operator(SpMat(a.mat_ - b.mat_));
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    check_dims(a, b);
    return Operator(SpMat(a.mat_ * b.mat_));
  }
  friend Operator operator*(cplx c, const Operator& a) { return Operator(SpMat(c * a.mat_), a.label_); }
  friend Operator operator*(double c, const Operator& a) { return cplx(c, 0) * a; }
  Operator operator-() const { return cplx(-1, 0) * *this; }

 private:
  static void check_dims(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("Operator: dimension mismatch");
  }

  SpMat mat_;
  std::string label_;
};

inline Operator identity_op(const RegisterLayout& layout) {
  SpMat m(layout.dim(), layout.dim());
  m.setIdentity();
  return Operator(std::move(m));
}

/// Embeds an arbitrary 2x2 matrix on one qubit, identity on every other.
inline Operator embed_matrix(const RegisterLayout& layout, int qubit, const Eigen::Matrix2cd& m) {
  const int n = layout.n_qubits();
  if (qubit < 0 || qubit >= n) throw std::out_of_range("embed_matrix: qubit index out of range");
  const Eigen::Index d = layout.dim();
  const Eigen::Index bit = Eigen::Index(1) << (n - 1 - qubit);

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<size_t>(2 * d));
  for (Eigen::Index r = 0; r < d; ++r) {
    const int rb = (r & bit) ? 1 : 0;
    for (int cb = 0; cb < 2; ++cb) {
      const cplx v = m(rb, cb);
      if (v == cplx(0, 0)) continue;
      const Eigen::Index c = cb ? (r | bit) : (r & ~bit);
      trips.emplace_back(r, c, v);
    }
  }
  SpMat out(d, d);
  out.setFromTriplets(trips.begin(), trips.end());
  return Operator(std::move(out));
}

/// Embeds one named single-qubit factor into the full register.
inline Operator embed_pauli(const RegisterLayout& layout, int qubit, Pauli factor) {
  return embed_matrix(layout, qubit, pauli_matrix(factor));
}

/// Product of single-qubit factors on distinct qubits, e.g. a Pauli string.
inline Operator embed_string(const RegisterLayout& layout,
                             const std::vector<std::pair<int, Pauli>>& factors) {
  Operator out = identity_op(layout);
  for (const auto& [q, p] : factors) out = out * embed_pauli(layout, q, p);
  return out;
}

/// One summand of combine(): coeff times an ordered product of factors.
struct Term {
  cplx coeff;
  std::vector<Operator> factors;
};

/// Returns sum_k c_k * prod_i A_{k,i}, products taken left to right. An empty
/// factor list contributes c_k * identity.
inline Operator combine(const std::vector<Term>& terms) {
  if (terms.empty()) throw std::invalid_argument("combine: no terms");
  Eigen::Index d = 0;
  for (const auto& t : terms)
    for (const auto& f : t.factors) {
      if (d == 0) d = f.dim();
      if (f.dim() != d) throw std::invalid_argument("combine: dimension mismatch");
    }
  if (d == 0) throw std::invalid_argument("combine: no factors to infer dimension from");

  SpMat acc(d, d);
  for (const auto& t : terms) {
    SpMat prod(d, d);
    prod.setIdentity();
    for (const auto& f : t.factors) prod = SpMat(prod * f.matrix());
    acc += t.coeff * prod;
  }
  acc.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return std::abs(v) > 0.0; });
  return Operator(std::move(acc));
}

/// Density matrix with validation helpers. Checks are explicit calls, not
/// per-operation, so hot loops can work on the raw matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(DMat rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) throw std::invalid_argument("DensityMatrix: matrix not square");
  }

  static DensityMatrix pure(const DVec& psi) {
    const double n2 = psi.squaredNorm();
    if (n2 <= 0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
    return DensityMatrix(DMat(psi * psi.adjoint() / n2));
  }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return DensityMatrix(DMat(DMat::Identity(d, d) / double(d)));
  }

  const DMat& matrix() const { return rho_; }
  DMat& matrix() { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

  double trace_error() const { return std::abs(rho_.trace() - cplx(1, 0)); }
  double hermiticity_error() const { return max_abs(DMat(rho_ - rho_.adjoint())); }
  /// Dense eigensolve; intended for spot checks, not per-step use.
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<DMat> es(DMat(0.5 * (rho_ + rho_.adjoint())), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Throws unless trace and hermiticity errors are within tolerance;
  /// positivity is only checked when requested.
  void assert_valid(bool check_positivity = false) const {
    if (trace_error() >= 1e-8) throw std::invalid_argument("DensityMatrix: trace deviates from one");
    if (hermiticity_error() >= 1e-10) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (check_positivity && min_eigenvalue() <= -1e-8)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }

 private:
  DMat rho_;
};

/// Tr(op * rho) without forming the product: sums op(r,c) * rho(c,r) over the
/// sparse pattern.
inline cplx expectation(const SpMat& op, const DMat& rho) {
  if (op.rows() != rho.rows()) throw std::invalid_argument("expectation: dimension mismatch");
  cplx acc = 0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

inline cplx expectation(const Operator& op, const DensityMatrix& rho) {
  return expectation(op.matrix(), rho.matrix());
}

inline cplx expectation(const Operator& op, const DMat& rho) { return expectation(op.matrix(), rho); }

/// <psi|op|psi> for a pure state.
inline cplx expectation(const SpMat& op, const DVec& psi) {
  if (op.rows() != psi.size()) throw std::invalid_argument("expectation: dimension mismatch");
  return psi.dot(DVec(op * psi));
}

inline cplx expectation(const Operator& op, const DVec& psi) { return expectation(op.matrix(), psi); }

}  // namespace z2stab
