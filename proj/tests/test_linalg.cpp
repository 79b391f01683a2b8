#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floquet_ab/errors.hpp"
#include "floquet_ab/linalg.hpp"
#include "floquet_ab/units.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace floquet_ab;
using doctest::Approx;

namespace {

void check_contract(const CMatrix& h, const EigenSystem& es) {
  CHECK(es.unitarity_defect() < 1e-10);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  CHECK(es.reconstruction_defect(h) < 1e-8 * scale);
  for (Eigen::Index k = 1; k < es.values.size(); ++k) CHECK(es.values(k) >= es.values(k - 1));
}

}  // namespace

TEST_CASE("identity") {
  const EigenSystem es = eigh(CMatrix::Identity(5, 5));
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(es.values(k) == 1.0);
  CHECK((es.vectors - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-level splitting") {
  const double g = 22.9;
  CMatrix h(2, 2);
  h << 0, g, g, 0;
  const EigenSystem es = eigh(h);
  CHECK(es.values(0) == Approx(-g).epsilon(1e-14));
  CHECK(es.values(1) == Approx(g).epsilon(1e-14));
  const double s = std::sqrt(0.5);
  // Phase convention: largest component (first on ties) real positive.
  CHECK(std::abs(es.vectors(0, 0) - Complex(s)) < 1e-14);
  CHECK(std::abs(es.vectors(1, 0) - Complex(-s)) < 1e-14);
  CHECK(std::abs(es.vectors(0, 1) - Complex(s)) < 1e-14);
  CHECK(std::abs(es.vectors(1, 1) - Complex(s)) < 1e-14);
  check_contract(h, es);
}

TEST_CASE("closed-form 2x2 and 3x3 agreement") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CMatrix h2 = oracle::random_hermitian(2, seed);
    const auto [lo, hi] = oracle::eig2(h2(0, 0).real(), h2(1, 1).real(), h2(0, 1));
    const EigenSystem e2 = eigh(h2);
    CHECK(std::abs(e2.values(0) - lo) < 1e-12);
    CHECK(std::abs(e2.values(1) - hi) < 1e-12);

    const CMatrix h3 = oracle::random_hermitian(3, 100 + seed);
    const auto ref = oracle::eig3(h3);
    const EigenSystem e3 = eigh(h3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(e3.values(k) - ref[k]) < 1e-12);
  }
}

TEST_CASE("random 8x8 against characteristic polynomial roots") {
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    const CMatrix h = oracle::random_hermitian(8, seed);
    const auto roots = oracle::charpoly_eigenvalues(h);
    const EigenSystem es = eigh(h);
    REQUIRE(roots.size() == 8);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(es.values(k) - roots[static_cast<std::size_t>(k)]) < 1e-8);
    check_contract(h, es);
  }
}

TEST_CASE("larger matrices against Eigen's solver") {
  for (int n : {20, 60, 117}) {
    const CMatrix h = oracle::random_hermitian(n, static_cast<std::uint64_t>(n), 100.0);
    const EigenSystem es = eigh(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> ref(h);
    CHECK((es.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9 * h.norm());
    check_contract(h, es);
  }
}

TEST_CASE("determinism and labels") {
  LabeledHermitian h;
  h.entries = oracle::random_hermitian(9, 3);
  h.labels = exciton_basis(4);
  const EigenSystem a = eigh(h);
  const EigenSystem b = eigh(h);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.labels.size() == 9);
  CHECK(a.labels[5] == label_f(0));
}

TEST_CASE("degenerate spectrum stays orthonormal") {
  CMatrix d = CMatrix::Zero(6, 6);
  d.diagonal() << 1, 1, 1, 2, 2, 5;
  const CMatrix u = oracle::random_unitary(6, 11);
  const CMatrix h = u * d * u.adjoint();
  const EigenSystem es = eigh(h);
  check_contract(h, es);
  CHECK(es.values(0) == Approx(1.0).epsilon(1e-12));
  CHECK(es.values(4) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eigh error paths") {
  CMatrix bad(2, 2);
  bad << 1, 2, 3, 1;
  CHECK_THROWS_AS(eigh(bad), ValidationError);

  JacobiOptions strict;
  strict.max_sweeps = 1;
  strict.rel_tol = 1e-300;
  try {
    eigh(oracle::random_hermitian(10, 5), strict);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.off_norm() > 0.0);
  }
}

TEST_CASE("unitary eigenphases") {
  const auto id = unitary_eigenphases(CMatrix::Identity(4, 4));
  for (double p : id) CHECK(std::abs(p) < 1e-14);

  CMatrix u = CMatrix::Identity(3, 3);
  u(0, 0) = std::polar(1.0, units::kPi / 3);
  const auto ph = unitary_eigenphases(u);
  CHECK(std::abs(ph[2] - units::kPi / 3) < 1e-14);
  CHECK(std::abs(ph[0]) < 1e-14);

  // e^{-iHt}: phases -lambda t.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CMatrix h = oracle::random_hermitian(8, seed);
    const double t = 0.3;
    const CMatrix prop = (Complex(0, -t) * h).exp();
    const EigenSystem es = eigh(h);
    std::vector<double> expected;
    for (Eigen::Index k = 0; k < 8; ++k) expected.push_back(-es.values(k) * t);
    const auto got = unitary_eigenphases(prop);
    CHECK(match_on_circle(got, expected, 2 * units::kPi).max_distance < 1e-8);
  }

  // Phases +theta and -theta share a cosine and must still be resolved.
  CMatrix pair = CMatrix::Zero(2, 2);
  pair(0, 0) = std::polar(1.0, 0.7);
  pair(1, 1) = std::polar(1.0, -0.7);
  const CMatrix v = oracle::random_unitary(2, 4);
  const auto split = unitary_eigenphases(v * pair * v.adjoint());
  CHECK(split[0] == Approx(-0.7).epsilon(1e-12));
  CHECK(split[1] == Approx(0.7).epsilon(1e-12));

  CMatrix not_unitary = CMatrix::Identity(2, 2) * 1.1;
  CHECK_THROWS_AS(unitary_eigenphases(not_unitary), ValidationError);
}

TEST_CASE("phase wrapping and circular matching") {
  CHECK(wrap_phase(units::kPi) == Approx(units::kPi));
  CHECK(wrap_phase(-units::kPi) == Approx(units::kPi));
  CHECK(wrap_phase(3 * units::kPi / 2) == Approx(-units::kPi / 2));
  CHECK(wrap_phase_positive(-units::kPi / 2) == Approx(3 * units::kPi / 2));

  const std::vector<double> a = {0.1, 3.0, 6.2};
  const std::vector<double> b = {6.2 - 2 * units::kPi + 1e-3, 0.1, 3.0};
  CHECK(match_on_circle(a, b, 2 * units::kPi).max_distance == Approx(1e-3).epsilon(1e-6));
  CHECK_THROWS_AS(match_on_circle(a, std::vector<double>{1.0}, 1.0), ValidationError);
}
