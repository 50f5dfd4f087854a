#include <doctest.h>

#include <cmath>
#include <random>

#include "vecmag/spin_core.hpp"

using namespace vecmag;

namespace {

const cplx I(0.0, 1.0);

// Independent ladder construction: <m+1|J+|m> = sqrt(J(J+1) - m(m+1)).
Matrix reference_jplus(int n) {
  const double j = 0.5 * n;
  Matrix p = Matrix::Zero(n + 1, n + 1);
  for (int k = 1; k <= n; ++k) {
    const double m = j - k;
    p(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return p;
}

}  // namespace

TEST_CASE("EnsembleDims") {
  const EnsembleDims d(7);
  CHECK(d.dim() == 8);
  CHECK(d.total_spin() == doctest::Approx(3.5));
  CHECK_FALSE(d.integer_spin());
  CHECK(d.m(0) == doctest::Approx(3.5));
  CHECK(d.m(7) == doctest::Approx(-3.5));
  CHECK_THROWS_AS(EnsembleDims(0), InvalidArgument);
  CHECK_THROWS_AS(EnsembleDims(-3), InvalidArgument);
}

TEST_CASE("collective_operator small cases") {
  const Matrix jz = collective_operator(EnsembleDims(2), Axis::z).matrix();
  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = 1.0;
  want(2, 2) = -1.0;
  CHECK((jz - want).norm() < 1e-15);

  const Matrix jx = collective_operator(EnsembleDims(1), Axis::x).matrix();
  Matrix px(2, 2);
  px << 0.0, 0.5, 0.5, 0.0;
  CHECK((jx - px).norm() < 1e-15);

  const EnsembleDims d4(4);
  const Matrix x = collective_operator(d4, Axis::x).matrix();
  const Matrix y = collective_operator(d4, Axis::y).matrix();
  const Matrix z = collective_operator(d4, Axis::z).matrix();
  CHECK((commutator(x, y) - I * z).norm() < 1e-12);
}

TEST_CASE("collective_operator matches the ladder construction") {
  for (int n : {1, 2, 3, 8, 17}) {
    const EnsembleDims d(n);
    const Matrix p = reference_jplus(n);
    const Matrix m = p.adjoint();
    CHECK((collective_operator(d, Axis::x).matrix() - (p + m) / 2.0).norm() < 1e-13);
    CHECK((collective_operator(d, Axis::y).matrix() - (p - m) / (2.0 * I)).norm() < 1e-13);
  }
}

TEST_CASE("field_hamiltonian") {
  const EnsembleDims d2(2);
  CHECK((field_hamiltonian(d2, {0, 0, 1}).matrix() - collective_operator(d2, Axis::z).matrix()).norm() < 1e-15);
  CHECK(field_hamiltonian(d2, {0, 0, 0}).matrix().norm() == 0.0);
  const Matrix h = field_hamiltonian(EnsembleDims(10), {4, 5, 6}).matrix();
  CHECK((h - h.adjoint()).norm() < 1e-12);
  CHECK(std::abs(h.trace()) < 1e-12);
  // gamma scales the coupling.
  const Matrix h2 = field_hamiltonian(EnsembleDims(3), {1, 2, 3, 2.0}).matrix();
  CHECK((h2 - 2.0 * field_hamiltonian(EnsembleDims(3), {1, 2, 3}).matrix()).norm() < 1e-13);
}

TEST_CASE("unitary_from_generator") {
  const EnsembleDims d(2);
  const auto jz = collective_operator(d, Axis::z);
  const auto jx = collective_operator(d, Axis::x);
  CHECK((unitary_from_generator(jx, 0.0).matrix - Matrix::Identity(3, 3)).norm() < 1e-14);

  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = std::exp(-I * M_PI);
  want(1, 1) = 1.0;
  want(2, 2) = std::exp(I * M_PI);
  CHECK((unitary_from_generator(jz, M_PI).matrix - want).norm() < 1e-14);

  CHECK((unitary_from_generator(jx, 2 * M_PI).matrix - Matrix::Identity(3, 3)).norm() < 1e-12);
  const EnsembleDims odd(3);
  CHECK((unitary_from_generator(collective_operator(odd, Axis::x), 2 * M_PI).matrix + Matrix::Identity(4, 4)).norm() <
        1e-12);
}

TEST_CASE("SpectralGenerator reuses one decomposition") {
  const auto h = field_hamiltonian(EnsembleDims(6), {0.3, -1.2, 0.7});
  const SpectralGenerator g(h);
  const Unitary a = g.unitary(0.4);
  const Unitary b = g.unitary(0.6);
  CHECK(((a * b).matrix - g.unitary(1.0).matrix).norm() < 1e-12);
  CHECK((g.unitary(0.4).matrix - unitary_from_generator(h, 0.4).matrix).norm() < 1e-13);
}

TEST_CASE("probe states") {
  const DickeState s2 = scs_state(EnsembleDims(2));
  CHECK(std::abs(s2.amplitude(0) - 1.0) < 1e-15);
  CHECK(std::abs(s2.amplitude(1)) == 0.0);
  const DickeState s10 = scs_state(EnsembleDims(10));
  CHECK(s10.amplitudes().size() == 11);
  CHECK(s10.norm() == doctest::Approx(1.0));
  const auto jz = collective_operator(EnsembleDims(10), Axis::z);
  CHECK(expectation(s10, jz) == doctest::Approx(5.0));

  const DickeState g2 = ghz_state(EnsembleDims(2));
  CHECK(std::abs(g2.amplitude(0) - M_SQRT1_2) < 1e-15);
  CHECK(std::abs(g2.amplitude(2) - M_SQRT1_2) < 1e-15);
  const DickeState g10 = ghz_state(EnsembleDims(10));
  CHECK(std::abs(expectation(g10, jz)) < 1e-14);
  CHECK(expectation(g10, jz.squared()) == doctest::Approx(25.0));
  CHECK(variance(s10, jz) == doctest::Approx(0.0));
}

TEST_CASE("fidelity") {
  const EnsembleDims d(4);
  CHECK(fidelity(scs_state(d), scs_state(d)) == doctest::Approx(1.0));
  CHECK(fidelity(scs_state(d), ghz_state(d)) == doctest::Approx(0.5));
  CHECK(fidelity(basis_state(d, 1), basis_state(d, 3)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fidelity(scs_state(d), scs_state(EnsembleDims(5))), DimensionMismatch);
}

TEST_CASE("validation") {
  const EnsembleDims d(2);
  Vector v = Vector::Zero(3);
  v(0) = 2.0;
  CHECK_THROWS_AS(DickeState(d, v), NumericalError);
  CHECK(DickeState::normalized(d, v).norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(DickeState(d, Vector::Zero(2)), DimensionMismatch);
  Matrix nh = Matrix::Zero(3, 3);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(CollectiveOperator(d, nh, "bad"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("w"), InvalidArgument);
  CHECK(parse_axis("y") == Axis::y);
}

TEST_CASE("property: algebra holds for N in 1..12, 20, 30") {
  std::vector<int> ns;
  for (int n = 1; n <= 12; ++n) ns.push_back(n);
  ns.push_back(20);
  ns.push_back(30);
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int n : ns) {
    CAPTURE(n);
    const EnsembleDims d(n);
    const Matrix x = collective_operator(d, Axis::x).matrix();
    const Matrix y = collective_operator(d, Axis::y).matrix();
    const Matrix z = collective_operator(d, Axis::z).matrix();
    CHECK((commutator(y, z) - I * x).norm() < 1e-10);
    CHECK((commutator(z, x) - I * y).norm() < 1e-10);
    const double j = d.total_spin();
    CHECK((x * x + y * y + z * z - j * (j + 1) * Matrix::Identity(d.dim(), d.dim())).norm() < 1e-10);
    for (int trial = 0; trial < 5; ++trial) {
      const auto h = field_hamiltonian(d, {g(rng), g(rng), g(rng)});
      const Matrix u = unitary_from_generator(h, 2.0 * g(rng)).matrix;
      CHECK((u.adjoint() * u - Matrix::Identity(d.dim(), d.dim())).norm() < 1e-10);
      Vector v(d.dim());
      for (int k = 0; k < d.dim(); ++k) v(k) = cplx(g(rng), g(rng));
      const DickeState psi = DickeState::normalized(d, v);
      CHECK(std::abs((u * psi.amplitudes()).norm() - 1.0) < 1e-12);
    }
  }
}
