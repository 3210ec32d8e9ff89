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
// Time steppers over complex matrices: an embedded Dormand-Prince 5(4) pair
// with FSAL and step control for general right-hand sides, and an Arnoldi
// (Krylov) exponential propagator for linear ones.

#pragma once

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "z2stab/common.hpp"

namespace z2stab {

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double h_min = 1e-13;     // relative to the span; below this the run aborts
  long max_steps = 100000000;
};

struct IntegrateStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  double h_final = 0;
};

namespace detail {

/// Hairer-style mixed error norm: RMS of |e| / (atol + rtol * max(|y0|,|y1|)).
inline double error_norm(const DMat& err, const DMat& y0, const DMat& y1, double atol, double rtol) {
  double acc = 0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = std::abs(err(i)) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / double(n));
}

}  // namespace detail

/// Integrates dy/dt = rhs(y) from t0 to t1 in place. The right-hand side is
/// called as rhs(y, dydt). Throws EvolveError on step-size underflow.
template <class RHS>
IntegrateStats integrate_rk45(RHS&& rhs, DMat& y, double t0, double t1,
                              const AdaptiveOptions& opt = {}) {
  // Dormand-Prince coefficients; the 7th stage doubles as the next first
  // stage (FSAL).
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegrateStats stats;
  if (t1 == t0) return stats;
  if (t1 < t0) throw std::invalid_argument("integrate_rk45: backward integration not supported");

  const double span = t1 - t0;
  DMat k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols());
  DMat k4(y.rows(), y.cols()), k5(y.rows(), y.cols()), k6(y.rows(), y.cols());
  DMat k7(y.rows(), y.cols()), ytmp(y.rows(), y.cols()), ynew(y.rows(), y.cols());
  DMat errm(y.rows(), y.cols());

  rhs(y, k1);
  ++stats.rhs_evals;

  // First step size from the ratio of state to derivative scale.
  double h;
  {
    const double ny = y.norm(), nf = k1.norm();
    h = (nf > 1e-12 * std::max(ny, 1.0)) ? 0.01 * std::max(ny, opt.abs_tol) / nf : span;
    h = std::min(h, span);
  }

  double t = t0;
  bool last_rejected = false;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps)
      throw EvolveError("integrate_rk45: step budget exhausted");
    if (h < opt.h_min * span)
      throw EvolveError("integrate_rk45: step size underflow (stiff problem or tolerance too tight)");
    if (t + h > t1) h = t1 - t;

    ytmp = y + h * a21 * k1;
    rhs(ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(ynew, k7);
    stats.rhs_evals += 6;

    errm = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = detail::error_norm(errm, y, ynew, opt.abs_tol, opt.rel_tol);

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++stats.accepted;
      double fac = (err > 1e-30) ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
      h *= fac;
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  stats.h_final = h;
  return stats;
}

struct KrylovOptions {
  int max_dim = 30;       // Arnoldi subspace size
  double tol = 1e-9;      // relative local error per substep
  long max_substeps = 1000000;
};

/// Computes w <- exp(t A) w for the linear operator apply(x, out) = A x,
/// using adaptive-substep Arnoldi approximation with the residual-based local
/// error estimate beta * h_{k+1,k} * |exp(tau H)_{k,1}|.
template <class Apply>
IntegrateStats krylov_expv(Apply&& apply, DMat& w, double t, const KrylovOptions& opt = {}) {
  IntegrateStats stats;
  if (t == 0) return stats;
  if (t < 0) throw std::invalid_argument("krylov_expv: negative time not supported");

  const Eigen::Index rows = w.rows(), cols = w.cols(), n = w.size();
  const int m = int(std::min<Eigen::Index>(opt.max_dim, n));
  std::vector<DMat> v(m + 1, DMat(rows, cols));
  DMat av(rows, cols);
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);

  auto flat = [](DMat& x) { return Eigen::Map<DVec>(x.data(), x.size()); };

  double remaining = t;
  double tau = t;
  bool have_anorm = false;
  double anorm = 0;

  while (remaining > 0) {
    if (stats.accepted + stats.rejected >= opt.max_substeps)
      throw EvolveError("krylov_expv: substep budget exhausted");

    const double beta = w.norm();
    if (beta == 0) return stats;  // zero vector is a fixed point

    v[0] = w / beta;
    int k = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      apply(v[j], av);
      ++stats.rhs_evals;
      if (!have_anorm) {
        anorm = std::max(av.norm(), 1e-30);
        have_anorm = true;
        tau = std::min(remaining, 10.0 / anorm);
      }
      // Modified Gram-Schmidt, repeated once for orthogonality.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const cplx c = flat(v[i]).dot(flat(av));
          if (pass == 0)
            hess(i, j) = c;
          else
            hess(i, j) += c;
          flat(av) -= c * flat(v[i]);
        }
      const double hnext = av.norm();
      if (hnext < 1e-12 * std::max(1.0, anorm)) {
        k = j + 1;
        breakdown = true;  // invariant subspace: result exact for any tau
        break;
      }
      hess(j + 1, j) = hnext;
      v[j + 1] = av / hnext;
    }

    for (;;) {
      const double step = breakdown ? remaining : std::min(tau, remaining);
      Eigen::MatrixXcd f = (step * hess.topLeftCorner(k, k)).exp();
      // Defect-based relative local error of the Krylov propagator.
      const double err = breakdown ? 0.0 : std::abs(hess(k, k - 1)) * std::abs(f(k - 1, 0)) * step;
      if (err <= opt.tol || step <= 1e-14 * t) {
        DVec coeff = beta * f.col(0);
        DMat next = DMat::Zero(rows, cols);
        for (int i = 0; i < k; ++i) next += coeff(i) * v[i];
        w.swap(next);
        remaining -= step;
        ++stats.accepted;
        stats.h_final = step;
        if (err < 0.1 * opt.tol) tau = std::min(2 * tau, std::max(remaining, step));
        break;
      }
      tau = 0.5 * step;
      ++stats.rejected;
    }
  }
  return stats;
}

}  // namespace z2stab
