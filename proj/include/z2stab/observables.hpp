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
// Diagnostics tracked along evolutions: gauge violation, gauge-sector
// energy, link-link and matter-matter correlators, running averages, and the
// transition energies of the physical-sector spectrum.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "z2stab/z2_model.hpp"

namespace z2stab {

/// Sampled time series produced by one evolution run: a shared strictly
/// increasing time grid plus named value columns in insertion order.
class TrajectoryRecord {
 public:
  std::vector<double> times;

  void add_series(const std::string& name, std::vector<double> values) {
    if (values.size() != times.size())
      throw std::invalid_argument("TrajectoryRecord: series length does not match time grid");
    names_.push_back(name);
    values_.push_back(std::move(values));
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& series(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return values_[i];
    throw std::out_of_range("TrajectoryRecord: no series named " + name);
  }
  const std::vector<std::vector<double>>& columns() const { return values_; }

  void validate() const {
    for (size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1])
        throw std::invalid_argument("TrajectoryRecord: time grid not strictly increasing");
    for (const auto& v : values_)
      if (v.size() != times.size())
        throw std::invalid_argument("TrajectoryRecord: ragged series");
  }

  std::string config_snapshot;
  std::uint64_t seed = 0;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
};

/// Precomputes every diagnostic operator for one model configuration so the
/// per-sample cost is a handful of sparse traces. Thread-safe once built.
class Observables {
 public:
  explicit Observables(const ModelConfig& cfg) : n_(cfg.n) {
    cfg.validate();
    const RegisterLayout lay = cfg.layout();
    Operator gsum = build_gauge_operator(cfg, 0);
    for (int j = 1; j < n_; ++j) gsum = gsum + build_gauge_operator(cfg, j);
    gauge_sum_ = gsum.matrix();

    h0_ = build_h0(cfg).matrix();
    Operator p = physical_projector(cfg);
    p_ = p.matrix();
    php_ = SpMat(p_ * h0_ * p_);

    std::vector<Term> links, matters;
    for (int j = 0; j < n_; ++j) {
      links.push_back({1.0, {embed_string(lay, {{lay.link_qubit(j - 1), Pauli::X},
                                                {lay.link_qubit(j), Pauli::X}})}});
      matters.push_back({1.0, {embed_string(lay, {{lay.matter_qubit(j), Pauli::Z},
                                                  {lay.matter_qubit(j + 1), Pauli::Z}})}});
    }
    link_corr_ = combine(links).matrix();
    matter_corr_ = combine(matters).matrix();
  }

  /// Mean gauge expectation (1/N)|sum_j <G_j>|; zero on the physical sector,
  /// one on the maximally mixed state, at most two.
  double gauge_violation(const DMat& rho) const {
    return std::abs(expectation(gauge_sum_, rho).real()) / n_;
  }

  /// Energy of the physical-sector component, Tr[P H0 P rho] / Tr[P rho].
  /// Uses the bare H0 so the value is independent of any gauge penalty.
  double gauge_sector_energy(const DMat& rho) const {
    const double weight = expectation(p_, rho).real();
    if (weight <= 1e-12)
      throw std::domain_error("gauge_sector_energy: physical-sector weight below numerical floor");
    return expectation(php_, rho).real() / weight;
  }

  /// Physical-sector weight Tr[P rho]; exposed for diagnostics.
  double sector_weight(const DMat& rho) const { return expectation(p_, rho).real(); }

  /// <sum_j X_{link(j-1)} X_{link(j)}>.
  double link_link_correlator(const DMat& rho) const { return expectation(link_corr_, rho).real(); }

  /// <sum_j Z_{matter(j)} Z_{matter(j+1)}>; commutes with every gauge
  /// operator, so it probes matter order without leaving the sector.
  double matter_matter_correlator(const DMat& rho) const {
    return expectation(matter_corr_, rho).real();
  }

  /// Plain <H0>, without sector projection.
  double h0_energy(const DMat& rho) const { return expectation(h0_, rho).real(); }

  int n_sites() const { return n_; }
  const SpMat& gauge_sum() const { return gauge_sum_; }
  const SpMat& h0_op() const { return h0_; }
  const SpMat& link_corr_op() const { return link_corr_; }
  const SpMat& matter_corr_op() const { return matter_corr_; }

 private:
  int n_;
  SpMat gauge_sum_, h0_, p_, php_, link_corr_, matter_corr_;
};

inline double gauge_violation(const DensityMatrix& rho, const ModelConfig& cfg) {
  return Observables(cfg).gauge_violation(rho.matrix());
}
inline double gauge_sector_energy(const DensityMatrix& rho, const ModelConfig& cfg) {
  return Observables(cfg).gauge_sector_energy(rho.matrix());
}
inline double link_link_correlator(const DensityMatrix& rho, const ModelConfig& cfg) {
  return Observables(cfg).link_link_correlator(rho.matrix());
}
inline double matter_matter_correlator(const DensityMatrix& rho, const ModelConfig& cfg) {
  return Observables(cfg).matter_matter_correlator(rho.matrix());
}

/// Causal sliding-window mean. full_window[k] marks samples whose trailing
/// window fits entirely inside the grid; earlier samples average over the
/// shorter available history.
struct SmoothedSeries {
  std::vector<double> values;
  std::vector<char> full_window;
};

inline SmoothedSeries running_average(const std::vector<double>& times,
                                      const std::vector<double>& values, double window = 10.0) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("running_average: empty or mismatched series");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw std::invalid_argument("running_average: time grid not strictly increasing");
  if (window <= 0) throw std::invalid_argument("running_average: window must be positive");

  const size_t n = times.size();
  // Prefix trapezoid integrals of the series.
  std::vector<double> prefix(n, 0.0);
  for (size_t i = 1; i < n; ++i)
    prefix[i] = prefix[i - 1] + 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);

  SmoothedSeries out;
  out.values.resize(n);
  out.full_window.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const double t_lo = times[k] - window;
    out.full_window[k] = (t_lo >= times.front() - 1e-12) ? 1 : 0;
    const double lo = std::max(t_lo, times.front());
    const double len = times[k] - lo;
    if (len <= 0) {
      out.values[k] = values[k];
      continue;
    }
    // Locate lo inside the grid and subtract the partial leading trapezoid.
    const auto it = std::upper_bound(times.begin(), times.begin() + k + 1, lo);
    const size_t j = static_cast<size_t>(it - times.begin()) - 1;
    double integral = prefix[k] - prefix[j];
    if (lo > times[j]) {
      const double frac = (lo - times[j]) / (times[j + 1] - times[j]);
      const double v_lo = values[j] + frac * (values[j + 1] - values[j]);
      integral -= 0.5 * (values[j] + v_lo) * (lo - times[j]);
    }
    out.values[k] = integral / len;
  }
  return out;
}

/// Eigenvalues of H0 restricted to the physical sector, ascending.
inline Eigen::VectorXd physical_sector_spectrum(const ModelConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = cfg.layout().dim();
  const DMat p = physical_projector(cfg).dense();
  const double shift = 1e3;
  DMat h = build_h0(cfg).dense() + shift * (DMat::Identity(d, d) - p);
  Eigen::SelfAdjointEigenSolver<DMat> es(DMat(0.5 * (h + h.adjoint())), Eigen::EigenvaluesOnly);
  std::vector<double> vals;
  for (double v : es.eigenvalues())
    if (v < 0.5 * shift) vals.push_back(v);
  Eigen::VectorXd out(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) out(i) = vals[i];
  return out;
}

/// All positive differences E_b - E_a of the physical-sector H0 spectrum,
/// deduplicated within 1e-9 and sorted ascending.
inline std::vector<double> h0_transition_energies(const ModelConfig& cfg) {
  const Eigen::VectorXd e = physical_sector_spectrum(cfg);
  std::vector<double> diffs;
  for (Eigen::Index a = 0; a < e.size(); ++a)
    for (Eigen::Index b = a + 1; b < e.size(); ++b) {
      const double d = e(b) - e(a);
      if (d > 1e-9) diffs.push_back(d);
    }
  std::sort(diffs.begin(), diffs.end());
  std::vector<double> out;
  for (double d : diffs)
    if (out.empty() || d - out.back() > 1e-9) out.push_back(d);
  return out;
}

}  // namespace z2stab
