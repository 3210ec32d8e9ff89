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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "z2stab/observables.hpp"

using namespace z2stab;

namespace {

ModelConfig cfg_n(int n) {
  ModelConfig c;
  c.n = n;
  return c;
}

}  // namespace

TEST_CASE("gauge violation hits its landmark values") {
  ModelConfig cfg = cfg_n(4);
  Observables obs(cfg);
  const Eigen::Index d = cfg.layout().dim();

  SECTION("zero on the physical sector") {
    REQUIRE(obs.gauge_violation(initial_state(cfg).matrix()) < 1e-10);
  }
  SECTION("one on the maximally mixed state") {
    REQUIRE(obs.gauge_violation(DensityMatrix::maximally_mixed(d).matrix()) ==
            Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("a single matter bit-flip contributes 2/N") {
    DVec err = embed_pauli(cfg.layout(), cfg.layout().matter_qubit(2), Pauli::X).matrix() *
               staggered_product_vector(cfg);
    REQUIRE(obs.gauge_violation(DensityMatrix::pure(err).matrix()) ==
            Catch::Approx(2.0 / cfg.n).margin(1e-12));
  }
}

TEST_CASE("gauge sector energy projects before averaging") {
  ModelConfig cfg = cfg_n(3);
  Observables obs(cfg);

  SECTION("ground state reports the sector ground energy") {
    GroundStateInfo info = physical_ground_state(cfg);
    REQUIRE(obs.gauge_sector_energy(DensityMatrix::pure(info.psi).matrix()) ==
            Catch::Approx(info.energy).margin(1e-9));
  }
  SECTION("in-sector product state reduces to a plain expectation") {
    DMat rho = initial_state([&] {
                 ModelConfig c = cfg;
                 c.initial = InitialStateKind::StaggeredProduct;
                 return c;
               }()).matrix();
    REQUIRE(obs.gauge_sector_energy(rho) == Catch::Approx(cfg.j_f * cfg.n).margin(1e-10));
  }
  SECTION("fully out-of-sector state raises the guard") {
    DVec err = embed_pauli(cfg.layout(), cfg.layout().matter_qubit(0), Pauli::X).matrix() *
               staggered_product_vector(cfg);
    REQUIRE_THROWS_AS(obs.gauge_sector_energy(DensityMatrix::pure(err).matrix()), std::domain_error);
  }
  SECTION("value is independent of the gauge penalty strength") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    const Eigen::Index d = cfg.layout().dim();
    DMat a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(n01(rng), n01(rng));
    DMat rho = a * a.adjoint();
    rho /= rho.trace().real();

    double ref = 0;
    bool have_ref = false;
    for (double g : {0.0, 1.0, 5.0}) {
      ModelConfig c = cfg;
      c.g = g;
      const double v = Observables(c).gauge_sector_energy(rho);
      if (!have_ref) {
        ref = v;
        have_ref = true;
      }
      REQUIRE(v == Catch::Approx(ref).margin(1e-12));
    }
  }
}

TEST_CASE("correlators take their product-state and mixed-state values") {
  ModelConfig cfg = cfg_n(4);
  Observables obs(cfg);
  const Eigen::Index d = cfg.layout().dim();
  DMat staggered = DensityMatrix::pure(staggered_product_vector(cfg)).matrix();
  DMat mixed = DensityMatrix::maximally_mixed(d).matrix();

  SECTION("link-link: all links aligned gives N, mixed gives zero") {
    REQUIRE(obs.link_link_correlator(staggered) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(std::abs(obs.link_link_correlator(mixed)) < 1e-12);
  }
  SECTION("matter-matter: staggered occupations give -N, mixed gives zero") {
    REQUIRE(obs.matter_matter_correlator(staggered) == Catch::Approx(-4.0).margin(1e-12));
    REQUIRE(std::abs(obs.matter_matter_correlator(mixed)) < 1e-12);
  }
  SECTION("matter-matter operator is gauge-invariant") {
    ModelConfig c = cfg_n(3);
    RegisterLayout lay = c.layout();
    std::vector<Term> terms;
    for (int j = 0; j < c.n; ++j)
      terms.push_back({1.0, {embed_string(lay, {{lay.matter_qubit(j), Pauli::Z},
                                                {lay.matter_qubit(j + 1), Pauli::Z}})}});
    DMat m = combine(terms).dense();
    for (int j = 0; j < c.n; ++j) {
      DMat g = build_gauge_operator(c, j).dense();
      REQUIRE(max_abs(DMat(m * g - g * m)) < 1e-12);
    }
  }
}

TEST_CASE("running average smooths as a trailing window") {
  SECTION("constant series is unchanged") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
      t.push_back(0.25 * i);
      v.push_back(3.5);
    }
    SmoothedSeries s = running_average(t, v, 10.0);
    for (double x : s.values) REQUIRE(x == Catch::Approx(3.5).margin(1e-12));
  }
  SECTION("linear ramp lags by half the window once the window is full") {
    const double a = 0.7;
    std::vector<double> t, v;
    for (int i = 0; i <= 200; ++i) {
      t.push_back(0.25 * i);
      v.push_back(a * t.back());
    }
    SmoothedSeries s = running_average(t, v, 10.0);
    for (size_t k = 0; k < t.size(); ++k) {
      if (!s.full_window[k]) continue;
      REQUIRE(s.values[k] == Catch::Approx(a * (t[k] - 5.0)).margin(1e-10));
    }
    // Partial-window flagging: exactly the samples before t = 10.
    for (size_t k = 0; k < t.size(); ++k)
      REQUIRE(bool(s.full_window[k]) == (t[k] >= 10.0 - 1e-12));
  }
  SECTION("linear ramp is exact on a jittered grid too") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 0.45);
    std::vector<double> t{0.0}, v{0.0};
    const double a = -1.3;
    while (t.back() < 40.0) {
      t.push_back(t.back() + u(rng));
      v.push_back(a * t.back());
    }
    v.front() = a * t.front();
    SmoothedSeries s = running_average(t, v, 10.0);
    for (size_t k = 0; k < t.size(); ++k) {
      if (!s.full_window[k]) continue;
      REQUIRE(s.values[k] == Catch::Approx(a * (t[k] - 5.0)).margin(1e-9));
    }
  }
  SECTION("fast alternation is strongly suppressed") {
    std::vector<double> t, v;
    for (int i = 0; i <= 400; ++i) {
      t.push_back(0.1 * i);
      v.push_back(i % 2 == 0 ? 1.0 : -1.0);
    }
    SmoothedSeries s = running_average(t, v, 10.0);
    for (size_t k = 0; k < t.size(); ++k)
      if (s.full_window[k]) REQUIRE(std::abs(s.values[k]) < 0.2);
  }
  SECTION("degenerate inputs are rejected") {
    REQUIRE_THROWS_AS(running_average({}, {}, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(running_average({0.0, 0.0}, {1.0, 1.0}, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(running_average({0.0, 1.0}, {1.0, 1.0}, -1.0), std::invalid_argument);
  }
}

TEST_CASE("transition energies come from the physical-sector spectrum") {
  SECTION("field-only model shows the 2 J_f line") {
    ModelConfig c = cfg_n(2);
    c.j_a = 0;
    std::vector<double> tr = h0_transition_energies(c);
    bool found = false;
    for (double d : tr)
      if (std::abs(d - 2 * c.j_f) < 1e-9) found = true;
    REQUIRE(found);
  }
  SECTION("list is positive, sorted, deduplicated") {
    std::vector<double> tr = h0_transition_energies(cfg_n(3));
    REQUIRE_FALSE(tr.empty());
    REQUIRE(tr.front() > 0);
    for (size_t i = 1; i < tr.size(); ++i) REQUIRE(tr[i] - tr[i - 1] > 1e-9);
  }
  SECTION("matches a brute-force spectrum difference table") {
    ModelConfig c = cfg_n(3);
    // Independent route: diagonalize P H0 P densely and keep eigenpairs with
    // sector support.
    DMat p = physical_projector(c).dense();
    DMat php = p * build_h0(c).dense() * p;
    Eigen::SelfAdjointEigenSolver<DMat> es(DMat(0.5 * (php + php.adjoint())));
    std::vector<double> sector;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      DVec v = es.eigenvectors().col(k);
      if ((v.adjoint() * p * v)(0).real() > 0.5) sector.push_back(es.eigenvalues()(k));
    }
    std::vector<double> want;
    for (size_t a = 0; a < sector.size(); ++a)
      for (size_t b = 0; b < sector.size(); ++b) {
        const double d = sector[b] - sector[a];
        if (d > 1e-9) want.push_back(d);
      }
    std::sort(want.begin(), want.end());
    std::vector<double> dedup;
    for (double d : want)
      if (dedup.empty() || d - dedup.back() > 1e-9) dedup.push_back(d);

    std::vector<double> got = h0_transition_energies(c);
    REQUIRE(got.size() == dedup.size());
    for (size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == Catch::Approx(dedup[i]).margin(1e-8));
  }
}

TEST_CASE("trajectory record enforces grid and series consistency") {
  TrajectoryRecord rec;
  rec.times = {0.0, 1.0, 2.0};
  rec.add_series("eps", {0.0, 0.1, 0.2});
  REQUIRE_NOTHROW(rec.validate());
  REQUIRE(rec.series("eps")[2] == Catch::Approx(0.2));
  REQUIRE_THROWS_AS(rec.series("missing"), std::out_of_range);
  REQUIRE_THROWS_AS(rec.add_series("bad", {1.0}), std::invalid_argument);

  TrajectoryRecord bad;
  bad.times = {0.0, 0.0};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}
