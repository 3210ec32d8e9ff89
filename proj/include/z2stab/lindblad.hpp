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
// Master-equation engine: fast right-hand-side application, adaptive time
// evolution with invariant monitoring, the vectorized superoperator, and
// steady-state solvers (dense shift-invert for small registers, exponential
// relaxation beyond that).

#pragma once

// The bundled lapack.h only honors the custom-complex escape hatch, so map
// the LAPACKE complex types onto std::complex before anything includes it.
#include <complex>
#ifndef LAPACK_COMPLEX_CUSTOM
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "z2stab/integrators.hpp"
#include "z2stab/pauli_algebra.hpp"
#include "z2stab/z2_model.hpp"

namespace z2stab {

/// Applies d rho/dt = i[rho,H] + sum_i (L rho L' - 1/2 {L'L, rho}) with the
/// Hamiltonian and decay halves folded into one sparse operator
/// K = -iH - 1/2 sum L'L, so one call costs two sparse-dense products per
/// jump plus two for K. Stateless apart from construction; safe to share
/// across threads.
class LindbladRHS {
 public:
  LindbladRHS(const Operator& h, const JumpOperatorSet& jumps) {
    if (!h.is_hermitian(1e-10)) throw std::invalid_argument("LindbladRHS: Hamiltonian not Hermitian");
    const Eigen::Index d = h.dim();
    SpMat k = SpMat(-kImag * h.matrix());
    for (const auto& l : jumps) {
      if (l.dim() != d) throw std::invalid_argument("LindbladRHS: jump dimension mismatch");
      jumps_.push_back(l.matrix());
      jump_adjs_.push_back(SpMat(l.matrix().adjoint()));
      k -= SpMat(0.5 * (jump_adjs_.back() * jumps_.back()));
    }
    k_ = k;
    k_adj_ = SpMat(k.adjoint());
  }

  Eigen::Index dim() const { return k_.rows(); }
  std::size_t n_jumps() const { return jumps_.size(); }

  void operator()(const DMat& rho, DMat& out) const {
    if (rho.rows() != dim()) throw std::invalid_argument("LindbladRHS: state dimension mismatch");
    out.noalias() = k_ * rho;
    out.noalias() += rho * k_adj_;
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      DMat tmp = jumps_[i] * rho;
      out.noalias() += tmp * jump_adjs_[i];
    }
  }

  DMat apply(const DMat& rho) const {
    DMat out(rho.rows(), rho.cols());
    (*this)(rho, out);
    return out;
  }

 private:
  SpMat k_, k_adj_;
  std::vector<SpMat> jumps_, jump_adjs_;
};

inline DMat lindblad_rhs(const DMat& rho, const Operator& h, const JumpOperatorSet& jumps) {
  return LindbladRHS(h, jumps).apply(rho);
}

enum class EvolveMethod { Auto, Rk45, Krylov };

inline std::string to_string(EvolveMethod m) {
  switch (m) {
    case EvolveMethod::Auto: return "auto";
    case EvolveMethod::Rk45: return "rk45";
    case EvolveMethod::Krylov: return "krylov";
  }
  return "?";
}

inline EvolveMethod evolve_method_from_string(const std::string& s) {
  if (s == "auto") return EvolveMethod::Auto;
  if (s == "rk45") return EvolveMethod::Rk45;
  if (s == "krylov") return EvolveMethod::Krylov;
  throw std::invalid_argument("unknown evolve method: " + s);
}

/// One master-equation run: generator, initial state, horizon, sampling, and
/// integrator settings.
struct EvolutionProblem {
  EvolutionProblem(Operator h_, JumpOperatorSet jumps_, DensityMatrix rho0_)
      : h(std::move(h_)), jumps(std::move(jumps_)), rho0(std::move(rho0_)) {}

  Operator h;
  JumpOperatorSet jumps;
  DensityMatrix rho0;
  double t_final = 10.0;
  double sample_interval = 1.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double krylov_tol = 1e-9;
  double invariant_tol = 1e-8;  // allowed trace / Hermiticity drift at samples
  EvolveMethod method = EvolveMethod::Auto;
};

struct EvolveInfo {
  IntegrateStats stats;
  EvolveMethod method_used = EvolveMethod::Rk45;
  double max_trace_drift = 0;
  double max_herm_drift = 0;
};

/// Integrates the problem, invoking callback(t, rho) at t = 0 and every
/// sample_interval up to t_final. Trace and Hermiticity are monitored at each
/// sample and never silently corrected; drift beyond invariant_tol aborts.
template <class Callback>
EvolveInfo evolve(const EvolutionProblem& p, Callback&& callback) {
  p.rho0.assert_valid();
  if (p.t_final <= 0) throw std::invalid_argument("evolve: t_final must be positive");
  if (p.sample_interval <= 0) throw std::invalid_argument("evolve: sample_interval must be positive");

  const LindbladRHS rhs(p.h, p.jumps);
  EvolveInfo info;
  info.method_used = p.method;
  if (info.method_used == EvolveMethod::Auto)
    info.method_used = (rhs.dim() >= 128) ? EvolveMethod::Krylov : EvolveMethod::Rk45;

  AdaptiveOptions aopt;
  aopt.rel_tol = p.rel_tol;
  aopt.abs_tol = p.abs_tol;
  KrylovOptions kopt;
  kopt.tol = p.krylov_tol;

  DMat rho = p.rho0.matrix();
  auto check = [&](double t) {
    const double tr_drift = std::abs(rho.trace() - cplx(1, 0));
    const double herm_drift = max_abs(DMat(rho - rho.adjoint()));
    info.max_trace_drift = std::max(info.max_trace_drift, tr_drift);
    info.max_herm_drift = std::max(info.max_herm_drift, herm_drift);
    if (tr_drift > p.invariant_tol)
      throw EvolveError("evolve: trace drift " + std::to_string(tr_drift) + " at t=" + std::to_string(t));
    if (herm_drift > p.invariant_tol)
      throw EvolveError("evolve: Hermiticity drift " + std::to_string(herm_drift) + " at t=" +
                        std::to_string(t));
  };

  check(0.0);
  callback(0.0, static_cast<const DMat&>(rho));
  double t = 0.0;
  for (long k = 1; t < p.t_final - 1e-12 * p.t_final; ++k) {
    const double tn = std::min(double(k) * p.sample_interval, p.t_final);
    if (info.method_used == EvolveMethod::Rk45) {
      IntegrateStats s = integrate_rk45(rhs, rho, t, tn, aopt);
      info.stats.accepted += s.accepted;
      info.stats.rejected += s.rejected;
      info.stats.rhs_evals += s.rhs_evals;
      info.stats.h_final = s.h_final;
    } else {
      IntegrateStats s = krylov_expv(rhs, rho, tn - t, kopt);
      info.stats.accepted += s.accepted;
      info.stats.rejected += s.rejected;
      info.stats.rhs_evals += s.rhs_evals;
      info.stats.h_final = s.h_final;
    }
    t = tn;
    check(t);
    callback(t, static_cast<const DMat&>(rho));
  }
  return info;
}

/// Vectorized generator acting on column-stacked states: vec(rho) has entry
/// (i,j) at position j*d + i, so vec(A X B) = (B^T kron A) vec(X).
struct Liouvillian {
  SpMat mat;
  Eigen::Index hilbert_dim = 0;
};

/// Assembles the superoperator. Memory use is estimated up front from the
/// sparsity of the pieces; exceeding max_bytes aborts instead of thrashing.
inline Liouvillian build_liouvillian(const Operator& h, const JumpOperatorSet& jumps,
                                     std::size_t max_bytes = std::size_t(2) << 30) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("build_liouvillian: Hamiltonian not Hermitian");
  const Eigen::Index d = h.dim();

  std::vector<SpMat> ldl;
  std::size_t est_nnz = 2 * std::size_t(d) * h.matrix().nonZeros();
  for (const auto& l : jumps) {
    if (l.dim() != d) throw std::invalid_argument("build_liouvillian: jump dimension mismatch");
    SpMat prod = SpMat(SpMat(l.matrix().adjoint()) * l.matrix());
    est_nnz += std::size_t(l.matrix().nonZeros()) * l.matrix().nonZeros();
    est_nnz += 2 * std::size_t(d) * prod.nonZeros();
    ldl.push_back(std::move(prod));
  }
  // Triplet staging roughly doubles the per-entry cost of ~24 bytes.
  if (est_nnz * 48 > max_bytes)
    throw ResourceLimitError("build_liouvillian: resource limit exceeded (estimated " +
                             std::to_string(est_nnz) + " nonzeros)");

  SpMat eye(d, d);
  eye.setIdentity();
  const SpMat& hm = h.matrix();
  SpMat sup = SpMat(-kImag * Eigen::kroneckerProduct(eye, hm)) +
              SpMat(kImag * Eigen::kroneckerProduct(SpMat(hm.transpose()), eye));
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const SpMat& l = jumps[i].matrix();
    sup += SpMat(Eigen::kroneckerProduct(SpMat(l.conjugate()), l));
    sup -= SpMat(0.5 * Eigen::kroneckerProduct(eye, ldl[i]));
    sup -= SpMat(0.5 * Eigen::kroneckerProduct(SpMat(ldl[i].transpose()), eye));
  }
  return {std::move(sup), d};
}

struct SteadyStateOptions {
  double shift = 1e-8;            // shift-invert target next to zero
  int block = 3;                  // subspace width, > expected multiplicity
  int max_iters = 50;
  double dense_tol = 1e-10;       // residual target on the dense path
  double iter_tol = 1e-8;         // residual target on the relaxation path
  double degeneracy_tol = 1e-10;  // |eigenvalue| below this counts as null
  Eigen::Index dense_max_dim = 64;
  bool force_iterative = false;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SteadyStateResult {
  DensityMatrix rho;
  int multiplicity = 1;
  double residual = 0;            // max-norm of the generator applied to rho
  std::vector<DMat> null_basis;   // unit-norm null vectors, one per multiplicity
  std::string method;
};

namespace detail {

/// In-place LU solve helpers around LAPACK's zgetrf/zgetrs.
class DenseLU {
 public:
  explicit DenseLU(DMat m) : lu_(std::move(m)), ipiv_(lu_.rows()) {
    const lapack_int n = lapack_int(lu_.rows());
    const lapack_int info =
        LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, ipiv_.data());
    if (info != 0) throw std::runtime_error("DenseLU: factorization failed, info=" + std::to_string(info));
  }

  void solve_in_place(DMat& b) const {
    const lapack_int n = lapack_int(lu_.rows());
    const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, lapack_int(b.cols()),
                                           lu_.data(), n, ipiv_.data(), b.data(), n);
    if (info != 0) throw std::runtime_error("DenseLU: solve failed, info=" + std::to_string(info));
  }

 private:
  DMat lu_;
  std::vector<lapack_int> ipiv_;
};

inline DMat unvec(const DVec& v, Eigen::Index d) {
  return Eigen::Map<const DMat>(v.data(), d, d);
}

}  // namespace detail

/// Solves for the stationary state of the generator. Small registers use a
/// dense-LU shift-invert subspace iteration on the vectorized generator,
/// which also reports null-space multiplicity; larger ones relax
/// exp(t L) rho with doubling horizons until the residual settles.
inline SteadyStateResult steady_state(const Operator& h, const JumpOperatorSet& jumps,
                                      const SteadyStateOptions& opt = {}) {
  const Eigen::Index d = h.dim();
  const LindbladRHS rhs(h, jumps);

  if (d <= opt.dense_max_dim && !opt.force_iterative) {
    const Liouvillian liou = build_liouvillian(h, jumps);
    const Eigen::Index n = d * d;
    const int k = std::min<Eigen::Index>(opt.block, n);

    DMat m(liou.mat);
    m.diagonal().array() -= opt.shift;
    detail::DenseLU lu(std::move(m));

    // Deterministic start block: the maximally mixed direction plus seeded
    // pseudorandom vectors.
    DMat x = DMat::Zero(n, k);
    for (Eigen::Index i = 0; i < d; ++i) x(i * d + i, 0) = 1.0;
    x.col(0) /= x.col(0).norm();
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> n01;
    for (int c = 1; c < k; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) x(i, c) = cplx(n01(rng), n01(rng));
      x.col(c) /= x.col(c).norm();
    }

    Eigen::VectorXcd ritz;
    DMat ritz_vecs;
    double best_residual = 1e300;
    for (int it = 0; it < opt.max_iters; ++it) {
      lu.solve_in_place(x);
      Eigen::HouseholderQR<DMat> qr(x);
      x = qr.householderQ() * DMat::Identity(n, k);

      DMat ax = liou.mat * x;
      DMat t = x.adjoint() * ax;
      Eigen::ComplexEigenSolver<DMat> es(t);
      ritz = es.eigenvalues();
      ritz_vecs = x * es.eigenvectors();

      best_residual = 1e300;
      for (int c = 0; c < k; ++c) {
        if (std::abs(ritz(c)) >= opt.degeneracy_tol) continue;
        const double r = (liou.mat * ritz_vecs.col(c)).cwiseAbs().maxCoeff();
        best_residual = std::min(best_residual, r);
      }
      if (best_residual < opt.dense_tol) break;
    }
    if (best_residual >= opt.dense_tol)
      throw std::runtime_error("steady_state: shift-invert iteration did not converge");

    std::vector<DMat> basis;
    for (int c = 0; c < k; ++c)
      if (std::abs(ritz(c)) < opt.degeneracy_tol)
        basis.push_back(detail::unvec(ritz_vecs.col(c), d));
    const int mult = int(basis.size());

    // Primary representative: the null combination with the largest trace.
    int pick = 0;
    double best_tr = -1;
    for (int c = 0; c < mult; ++c) {
      const double tr = std::abs(basis[c].trace());
      if (tr > best_tr) {
        best_tr = tr;
        pick = c;
      }
    }
    if (best_tr < 1e-12) throw std::runtime_error("steady_state: null space has no trace-carrying state");
    DMat rho = basis[pick];
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace();

    // Relaxation modes within backward error over the spectral gap leak into
    // the extracted vector and can leave rho slightly indefinite. Remove the
    // negative part; the residual recheck rejects the repair unless the leak
    // was a genuinely slow direction.
    Eigen::SelfAdjointEigenSolver<DMat> rho_eig(rho);
    if (rho_eig.eigenvalues().minCoeff() < 0.0) {
      const DMat clipped = rho_eig.eigenvectors() *
                           rho_eig.eigenvalues().cwiseMax(0.0).cast<cplx>().asDiagonal() *
                           rho_eig.eigenvectors().adjoint();
      rho = clipped / clipped.trace();
    }

    SteadyStateResult res{DensityMatrix(std::move(rho)), mult, 0.0, std::move(basis),
                          "dense_shift_invert"};
    res.residual = max_abs(rhs.apply(res.rho.matrix()));
    if (mult == 1 && res.residual >= opt.dense_tol)
      throw std::runtime_error("steady_state: steady state residual above tolerance");
    if (mult == 1 && res.rho.min_eigenvalue() < -1e-10)
      throw std::runtime_error("steady_state: steady state not positive semidefinite");
    return res;
  }

  // Relaxation path: propagate the maximally mixed state with doubling
  // horizons until the generator's action is negligible.
  DMat rho = DMat::Identity(d, d) / double(d);
  KrylovOptions kopt;
  kopt.tol = 0.1 * opt.iter_tol;
  double span = 1.0;
  double residual = max_abs(rhs.apply(rho));
  for (int it = 0; it < 80 && residual >= opt.iter_tol; ++it) {
    krylov_expv(rhs, rho, span, kopt);
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace();
    residual = max_abs(rhs.apply(rho));
    span = std::min(2.0 * span, 512.0);
  }
  if (residual >= opt.iter_tol)
    throw std::runtime_error("steady_state: relaxation did not reach the residual target");
  SteadyStateResult res{DensityMatrix(std::move(rho)), 1, residual, {}, "krylov_relaxation"};
  return res;
}

}  // namespace z2stab
