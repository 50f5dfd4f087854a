#include <doctest.h>

#include <cmath>

#include "vecmag/schemes.hpp"

using namespace vecmag;

namespace {

SchemeConfig cfg(Scheme s, Probe p, int n, FieldVector b, double t = 1.0) {
  SchemeConfig c;
  c.scheme = s;
  c.probe = p;
  c.dims = EnsembleDims(n);
  c.field = b;
  c.durations = {t, t, t};
  return c;
}

double sim_jz(const SchemeConfig& c, Axis a = Axis::x) {
  return expectation(final_state(c, a), collective_operator(c.dims, Axis::z));
}

}  // namespace

TEST_CASE("parallel signals") {
  CHECK(std::abs(sim_jz(cfg(Scheme::parallel, Probe::scs, 10, {0, 1, 1}), Axis::x)) < 1e-13);
  for (double t : {0.05, 0.4, 1.3, 2.9}) {
    const SchemeConfig scs = cfg(Scheme::parallel, Probe::scs, 10, {2, 2, 2}, t);
    CHECK(std::abs(std::abs(sim_jz(scs, Axis::x)) - std::abs(5 * std::sin(2 * t))) < 1e-10);
    const SchemeConfig ghz = cfg(Scheme::parallel, Probe::ghz, 10, {2, 2, 2}, t);
    CHECK(sim_jz(ghz, Axis::z) == doctest::Approx(5 * std::sin(20 * t)).epsilon(1e-10));
    for (Axis a : kAxes) {
      CHECK(sim_jz(scs, a) == doctest::Approx(chain_sign(scs, a) * analytic_jz(scs, a)).epsilon(1e-10));
      CHECK(sim_jz(ghz, a) == doctest::Approx(chain_sign(ghz, a) * analytic_jz(ghz, a)).epsilon(1e-10));
    }
  }
  const SchemeConfig top = cfg(Scheme::parallel, Probe::scs, 10, {M_PI / 2, 0.3, 0.3});
  CHECK(analytic_jz(top, Axis::x) == doctest::Approx(5.0));
  CHECK(analytic_jz2(top, Axis::x) == doctest::Approx(25.0));
}

TEST_CASE("sequential signals") {
  const SchemeConfig zero = cfg(Scheme::sequential, Probe::scs, 10, {0, 0, 0});
  CHECK(std::abs(sim_jz(zero)) < 1e-13);
  CHECK(std::abs(analytic_jz(cfg(Scheme::sequential, Probe::scs, 10, {0.7, 0, 0}))) < 1e-14);
  for (double t : {0.1, 0.37, 1.05}) {
    for (Probe p : {Probe::scs, Probe::ghz}) {
      const SchemeConfig c = cfg(Scheme::sequential, p, 10, {10, 6, 2}, t);
      CHECK(sim_jz(c) == doctest::Approx(chain_sign(c, Axis::x) * analytic_jz(c)).epsilon(1e-10));
      const auto jz = collective_operator(c.dims, Axis::z);
      CHECK(expectation(sequential_final_state(c), jz.squared()) == doctest::Approx(analytic_jz2(c)).epsilon(1e-10));
    }
  }
  // N/2 odd flips the parity term.
  const SchemeConfig n6 = cfg(Scheme::sequential, Probe::ghz, 6, {1.1, 0.4, 0.3}, 0.7);
  CHECK(sim_jz(n6) == doctest::Approx(chain_sign(n6, Axis::x) * analytic_jz(n6)).epsilon(1e-10));
  CHECK_THROWS_AS(analytic_jz(cfg(Scheme::sequential, Probe::ghz, 5, {1, 1, 1})), UnsupportedBranch);
}

TEST_CASE("chain descriptions are printable") {
  CHECK_FALSE(sequential_chain(Probe::ghz).describe().empty());
  CHECK(parallel_chain(Probe::scs, Axis::z).steps.size() == 3);
}

TEST_CASE("analytic and numeric precision") {
  const SchemeConfig scs = cfg(Scheme::parallel, Probe::scs, 10, {0.3, 0.4, 0.5});
  const SchemeConfig ghz = cfg(Scheme::parallel, Probe::ghz, 10, {0.3, 0.4, 0.5});
  for (Axis a : kAxes) {
    CHECK(analytic_delta_b(scs, a) == doctest::Approx(1 / std::sqrt(10.0)));
    CHECK(analytic_delta_b(ghz, a) == doctest::Approx(0.1));
    CHECK(delta_b_numeric(scs, a) == doctest::Approx(1 / std::sqrt(10.0)).epsilon(1e-6));
    CHECK(delta_b_numeric(ghz, a) == doctest::Approx(0.1).epsilon(1e-6));
  }
  const SchemeConfig seq = cfg(Scheme::sequential, Probe::ghz, 10, {0.13, 0.27, 0.11});
  for (Axis a : kAxes) {
    const double want = analytic_delta_b(seq, a);
    REQUIRE(std::isfinite(want));
    CHECK(delta_b_numeric(seq, a) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("blind spots return the sentinel") {
  // Sequential SCS with phi_x = phi_y = 0: Bz is unmeasurable.
  const SchemeConfig c = cfg(Scheme::sequential, Probe::scs, 10, {0, 0, 0.4});
  CHECK(is_blind_spot(analytic_delta_b(c, Axis::z)));
  CHECK(qfi_analytic(c, Axis::z).main == doctest::Approx(0.0));
  CHECK(is_blind_spot(delta_b_numeric(c, Axis::z)));
  const PrecisionReport r = precision_report(c);
  CHECK(r.axes[2].blind_spot);
  const auto j = to_json(r);
  CHECK(j["axes"][2]["delta_b_numeric"].is_null());
}

TEST_CASE("QFI") {
  const SchemeConfig scs = cfg(Scheme::parallel, Probe::scs, 10, {0.9, 0.2, 1.4}, 1.5);
  const SchemeConfig ghz = cfg(Scheme::parallel, Probe::ghz, 10, {0.9, 0.2, 1.4}, 1.5);
  for (Axis a : kAxes) {
    CHECK(qfi_numeric(scs, a) == doctest::Approx(10 * 2.25).epsilon(1e-6));
    CHECK(qfi_numeric(ghz, a) == doctest::Approx(100 * 2.25).epsilon(1e-6));
  }
  const SchemeConfig seq = cfg(Scheme::sequential, Probe::scs, 10, {0.9, 0.2, 1.4});
  CHECK(qfi_analytic(seq, Axis::x).main == doctest::Approx(10.0));
  CHECK(qfi_numeric(seq, Axis::y) == doctest::Approx(10 * std::cos(0.9) * std::cos(0.9)).epsilon(1e-6));
  for (Axis a : kAxes) CHECK(qfi_numeric(seq, a) == doctest::Approx(qfi_analytic(seq, a).main).epsilon(1e-6));

  const SchemeConfig sg = cfg(Scheme::sequential, Probe::ghz, 10, {0.21, 0.5, 0.8});
  const AnalyticQfi y = qfi_analytic(sg, Axis::y);
  CHECK(y.differ());
  CHECK(y.main == doctest::Approx(100 * std::cos(0.21) * std::cos(0.21)));
  CHECK(y.appendix == doctest::Approx(100 * std::cos(2.1) * std::cos(2.1)));
  CHECK(qfi_numeric(sg, Axis::y) == doctest::Approx(y.appendix).epsilon(1e-6));
}

TEST_CASE("precision report saturates the bound for parallel probes") {
  for (Probe p : {Probe::scs, Probe::ghz}) {
    const PrecisionReport r = precision_report(cfg(Scheme::parallel, p, 10, {0.3, 0.4, 0.5}));
    for (const auto& ax : r.axes) {
      CHECK(ax.delta_b_numeric == doctest::Approx(ax.qcrb).epsilon(1e-6));
      CHECK(ax.delta_jz * ax.delta_jz >= -1e-12);
    }
  }
}

TEST_CASE("property: numeric precision never beats the QFI bound") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 1.5);
  for (int i = 0; i < 30; ++i) {
    const Probe p = i % 2 ? Probe::ghz : Probe::scs;
    const SchemeConfig c = cfg(Scheme::sequential, p, 8, {u(rng), u(rng), u(rng)}, u(rng));
    for (Axis a : kAxes) {
      const double db = delta_b_numeric(c, a);
      const double f = qfi_numeric(c, a);
      if (!is_blind_spot(db) && f > 1e-8) CHECK(db >= 1 / std::sqrt(f) - 1e-9);
    }
  }
}

TEST_CASE("exact pulsed evolution tracks the effective one") {
  SchemeConfig c = cfg(Scheme::parallel, Probe::scs, 10, {2, 2, 2}, 0.8);
  const double eff = sim_jz(c, Axis::y);
  c.evolution = Evolution::exact_pulsed;
  c.tau = 1e-4;
  CHECK(std::abs(sim_jz(c, Axis::y) - eff) < 1e-3);
}

TEST_CASE("config json echo") {
  const auto j = to_json(cfg(Scheme::sequential, Probe::ghz, 12, {1, 2, 3}));
  CHECK(j["scheme"] == "sequential");
  CHECK(j["probe"] == "ghz");
  CHECK(j["N"] == 12);
  CHECK_THROWS_AS(parse_probe("noon"), InvalidArgument);
}
