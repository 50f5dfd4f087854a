#include <doctest.h>

#include <cmath>

#include "vecmag/pulse_engine.hpp"

using namespace vecmag;

TEST_CASE("DDSchedule::covering") {
  const DDSchedule s = DDSchedule::covering(Axis::y, 2.0, 1e-3);
  CHECK(s.pairs == 1000);
  CHECK(s.duration() == doctest::Approx(2.0).epsilon(1e-15));
  const DDSchedule odd = DDSchedule::covering(Axis::x, 1.0, 0.3);
  CHECK(odd.pairs == 2);
  CHECK(odd.tau == doctest::Approx(0.25));
  CHECK(DDSchedule::covering(Axis::x, 0.0, 1e-3).pairs == 0);
}

TEST_CASE("zero field: pulse pairs cancel") {
  const EnsembleDims d(6);
  const DickeState psi = scs_state(d);
  const std::vector<DDSchedule> s{{Axis::x, 7, 0.01, PulseMode::alternating}, {Axis::z, 3, 0.02, PulseMode::alternating}};
  CHECK(fidelity(evolve_exact(psi, {0, 0, 0}, s), psi) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("empty schedule returns the input and bad tau is rejected") {
  const DickeState psi = ghz_state(EnsembleDims(4));
  CHECK(fidelity(evolve_exact(psi, {1, 2, 3}, {}), psi) == doctest::Approx(1.0));
  const DDSchedule bad{Axis::x, 3, 0.0, PulseMode::alternating};
  CHECK_THROWS_AS(evolve_exact(psi, {1, 2, 3}, std::span<const DDSchedule>(&bad, 1)), InvalidArgument);
}

TEST_CASE("single pair matches the first-order expansion") {
  const EnsembleDims d(10);
  const DickeState psi = scs_state(d);
  const FieldVector b{4, 5, 6};
  const double tau = 1e-6;
  const DDSchedule s{Axis::x, 1, tau, PulseMode::alternating};
  const Vector out = evolve_exact(psi, b, std::span<const DDSchedule>(&s, 1)).amplitudes();
  const Matrix jx = collective_operator(d, Axis::x).matrix();
  const Vector first = psi.amplitudes() - cplx(0, 2.0 * b.bx * tau) * (jx * psi.amplitudes());
  // Global phase e^{-i pi Jx} e^{+i pi Jx} = 1 in alternating mode.
  const double step = (first - psi.amplitudes()).norm();
  CHECK(step > 1e-5);
  CHECK((out - first).norm() < 1e-3 * step);
}

TEST_CASE("fine pulses reproduce the effective evolution") {
  const EnsembleDims d(10);
  const DickeState psi = scs_state(d);
  const FieldVector b{4, 5, 6};
  const double t = 2.0;
  const double tau = 2e-4 * t;
  const auto sched = xyz_schedules(t, tau, PulseMode::alternating);
  const DickeState exact = evolve_exact(psi, b, sched);
  const std::vector<EffectiveSegment> segs{{Axis::x, t, b.bx, 1.0}, {Axis::y, t, b.by, 1.0}, {Axis::z, t, b.bz, 1.0}};
  const DickeState eff = evolve_effective(psi, segs);
  CHECK(fidelity(exact, eff) >= 0.9999);

  const DDSchedule xs = DDSchedule::covering(Axis::x, 1.0, 0.002);
  CHECK(fidelity(evolve_exact(psi, b, std::span<const DDSchedule>(&xs, 1)),
                 evolve_effective(psi, std::vector<EffectiveSegment>{{Axis::x, 1.0, b.bx, 1.0}})) >= 0.999);
}

TEST_CASE("effective segments") {
  const EnsembleDims d(10);
  const DickeState psi = scs_state(d);
  const DickeState z = evolve_effective(psi, std::vector<EffectiveSegment>{{Axis::z, 1.3, 2.0, 1.0}});
  CHECK(fidelity(z, psi) == doctest::Approx(1.0));
  // Rotation about x at rate Bx = 2 turns <Jz> into 5 cos(2T).
  const auto jz = collective_operator(d, Axis::z);
  for (double t : {0.1, 0.7, 1.9}) {
    const DickeState s = evolve_effective(psi, std::vector<EffectiveSegment>{{Axis::x, t, 2.0, 1.0}});
    CHECK(expectation(s, jz) == doctest::Approx(5.0 * std::cos(2.0 * t)).epsilon(1e-12));
  }
}

TEST_CASE("F1 degrades with coarser pulses") {
  const std::vector<double> ratios{2e-4, 2e-3, 5e-3};
  const auto curves = fidelity_f1(EnsembleDims(10), {4, 5, 6}, 6.0, ratios);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].min_fidelity() >= 0.999);
  CHECK(curves[1].min_fidelity() >= 0.99);
  CHECK(curves[2].min_fidelity() < curves[1].min_fidelity());
  CHECK(curves[0].samples.front().t == 0.0);
  CHECK(curves[0].samples.back().t == doctest::Approx(6.0));
  CHECK_THROWS_AS(fidelity_f1(EnsembleDims(4), {1, 1, 1}, 3.0, std::vector<double>{0.0}), InvalidArgument);
}

TEST_CASE("F2 statistics") {
  const DickeState psi = scs_state(EnsembleDims(6));
  const auto sched = xyz_schedules(0.2, 1e-3, PulseMode::alternating);
  const F2Result zero = fidelity_f2(psi, {4, 5, 6}, sched, NoiseModel{0.0, 3, 1, ErrorCorrelation::per_pair});
  for (const auto& s : zero.samples) {
    CHECK(s.mean == 1.0);
    CHECK(s.stddev == 0.0);
  }
  CHECK_THROWS_AS(fidelity_f2(psi, {4, 5, 6}, sched, NoiseModel{0.1, 0, 1}), InvalidArgument);

  const NoiseModel noise{0.06 * M_PI, 6, 11, ErrorCorrelation::per_pulse};
  const F2Result one = fidelity_f2(psi, {4, 5, 6}, sched, noise, 1);
  const F2Result many = fidelity_f2(psi, {4, 5, 6}, sched, noise, 3);
  REQUIRE(one.samples.size() == many.samples.size());
  for (std::size_t k = 0; k < one.samples.size(); ++k) {
    CHECK(one.samples[k].mean == many.samples[k].mean);
    CHECK(one.samples[k].stddev == many.samples[k].stddev);
  }
  CHECK(one.trial_mean == many.trial_mean);
}

TEST_CASE("alternating pulses beat identical pulses under angle errors") {
  const DickeState psi = scs_state(EnsembleDims(10));
  const NoiseModel noise{0.06 * M_PI, 8, 5, ErrorCorrelation::per_pair};
  const auto alt = fidelity_f2(psi, {4, 5, 6}, xyz_schedules(0.5, 1e-3, PulseMode::alternating), noise);
  const auto idn = fidelity_f2(psi, {4, 5, 6}, xyz_schedules(0.5, 1e-3, PulseMode::identical), noise);
  CHECK(alt.min_mean() >= 0.99);
  CHECK(alt.min_mean() > idn.min_mean());
}

TEST_CASE("trial streams are reproducible and distinct") {
  Rng a = trial_rng(7, 0), b = trial_rng(7, 0), c = trial_rng(7, 1);
  const auto va = a(), vb = b(), vc = c();
  CHECK(va == vb);
  CHECK(va != vc);
}

TEST_CASE("property: norm survives 1e4 noisy pairs") {
  const EnsembleDims d(12);
  const DickeState psi = ghz_state(d);
  const DDSchedule s{Axis::y, 10000, 1e-4, PulseMode::identical};
  Rng rng = trial_rng(3, 0);
  double worst = 0.0;
  evolve_exact(psi, {1.1, -0.4, 2.3}, std::span<const DDSchedule>(&s, 1), PulseError{0.2, ErrorCorrelation::per_pulse},
               &rng, [&](std::size_t, double, const Vector& v) { worst = std::max(worst, std::abs(v.norm() - 1.0)); });
  CHECK(worst < 1e-10);
}

TEST_CASE("enum parsing") {
  CHECK(parse_pulse_mode("identical") == PulseMode::identical);
  CHECK(parse_error_correlation("per-pulse") == ErrorCorrelation::per_pulse);
  CHECK_THROWS_AS(parse_pulse_mode("sometimes"), InvalidArgument);
}
