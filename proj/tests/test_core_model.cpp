#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <cmath>

using namespace floquet_ab;
using doctest::Approx;

namespace {

ChromophoreSpec at(Vec3 pos, Vec3 dir) {
  ChromophoreSpec c;
  c.position_A = pos;
  c.dipole_dir = dir.normalized();
  return c;
}

}  // namespace

TEST_CASE("franck_condon_overlap") {
  CHECK(franck_condon_overlap(0, 0.0) == 1.0);
  CHECK(franck_condon_overlap(1, 0.0) == 0.0);
  CHECK(franck_condon_overlap(0, 0.31) == Approx(0.8564151774836135).epsilon(1e-12));
  CHECK(franck_condon_overlap(1, 0.31) == Approx(0.4768317904980012).epsilon(1e-12));

  CHECK_THROWS_AS(franck_condon_overlap(-1, 0.31), ValidationError);
  CHECK_THROWS_AS(franck_condon_overlap(0, -0.1), ValidationError);

  // Poisson sum rule.
  double sum = 0.0;
  for (int n = 0; n <= 20; ++n) sum += std::pow(franck_condon_overlap(n, 0.31), 2);
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("dipole_coupling geometry") {
  const double eta = 982.0;
  const auto a = at({0, 0, 0}, {0, 1, 0});
  const auto b = at({3.5, 0, 0}, {0, 1, 0});
  CHECK(dipole_coupling(a, b, eta) == Approx(22.9).epsilon(0.05 / 22.9));
  CHECK(dipole_coupling(a, b, eta) == Approx(982.0 / (3.5 * 3.5 * 3.5)).epsilon(1e-14));

  const auto h1 = at({0, 0, 0}, {1, 0, 0});
  const auto h2 = at({3.5, 0, 0}, {1, 0, 0});
  CHECK(dipole_coupling(h1, h2, eta) == Approx(-2.0 * 982.0 / (3.5 * 3.5 * 3.5)).epsilon(1e-14));

  const auto p1 = at({0, 0, 0}, {0, 1, 0});
  const auto p2 = at({3.5, 0, 0}, {0, 0, 1});
  CHECK(std::abs(dipole_coupling(p1, p2, eta)) < 1e-15);

  const auto c = at({0.3, -1.2, 0.7}, {0.2, 0.5, -0.1});
  const auto d = at({2.1, 0.4, -1.5}, {-0.7, 0.1, 0.3});
  CHECK(dipole_coupling(c, d, eta) == Approx(dipole_coupling(d, c, eta)).epsilon(1e-14));

  auto c2 = c, d2 = d;
  c2.position_A *= 2.0;
  d2.position_A *= 2.0;
  CHECK(dipole_coupling(c2, d2, eta) == Approx(dipole_coupling(c, d, eta) / 8.0).epsilon(1e-12));

  CHECK_THROWS_AS(dipole_coupling(a, a, eta), SingularityError);
}

TEST_CASE("default tetramer construction") {
  const auto spec = default_square_tetramer(units::deg_to_rad(45), units::deg_to_rad(315));
  REQUIRE(spec.size() == 4);
  for (const auto& c : spec.chromophores) CHECK(std::abs(c.dipole_dir.norm() - 1.0) < 1e-12);
  CHECK((spec.chromophores[1].dipole_dir - Vec3::UnitX()).norm() == 0.0);
  CHECK((spec.chromophores[3].dipole_dir - Vec3::UnitY()).norm() == 0.0);
  CHECK(spec.chromophores[0].dipole_dir.x() == Approx(std::sqrt(0.5)));
  CHECK(spec.chromophores[2].dipole_dir.y() == Approx(-std::sqrt(0.5)));
  CHECK(spec.omega_f_cm1() == 28080.0);

  const auto flat = default_square_tetramer(0.0, 0.0);
  for (int i : {0, 1, 2}) CHECK((flat.chromophores[i].dipole_dir - Vec3::UnitX()).norm() < 1e-15);

  for (double t1 : {0.1, 1.3, 2.9, 4.4})
    for (const auto& c : default_square_tetramer(t1, 5.0 - t1).chromophores)
      CHECK(std::abs(c.dipole_dir.norm() - 1.0) < 1e-12);
}

TEST_CASE("exciton Hamiltonian structure") {
  const auto spec = reference_tetramer();
  const auto h = build_exciton_hamiltonian(spec);
  REQUIRE(h.dim() == 9);
  CHECK(h.labels[0].str() == "G");
  CHECK(h.labels[1].str() == "E1");
  CHECK(h.labels[8].str() == "F4");

  CHECK((h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.entries.imag().cwiseAbs().maxCoeff() == 0.0);
  for (int i = 1; i <= 4; ++i) {
    CHECK(h.entries(i, i).real() == 27695.0);
    CHECK(h.entries(4 + i, 4 + i).real() == 28080.0);
  }
  for (int k = 1; k < 9; ++k) {
    CHECK(h.entries(0, k) == Complex(0.0));
    CHECK(h.entries(k, 0) == Complex(0.0));
  }
  CHECK(h.entries(0, 0) == Complex(0.0));

  // Diagonal pairs (1,3), (2,4) are not neighbours.
  CHECK(h.entries(1, 3) == Complex(0.0));
  CHECK(h.entries(2, 4) == Complex(0.0));

  for (auto [i, j] : spec.neighbor_pairs) {
    const double jee = h.entries(1 + i, 1 + j).real();
    const double jff = h.entries(5 + i, 5 + j).real();
    const double jef = h.entries(1 + i, 5 + j).real();
    CHECK(jee / jff == Approx(1.0 / 0.31).epsilon(1e-12));
    CHECK(jef * jef == Approx(jee * jff).epsilon(1e-12));
    CHECK(h.entries(1 + j, 5 + i).real() == jef);
  }

  // Only the 2-3 pair is positive in this layout.
  CHECK(h.entries(1, 2).real() < 0);
  CHECK(h.entries(2, 3).real() > 0);
  CHECK(h.entries(3, 4).real() < 0);
  CHECK(h.entries(4, 1).real() < 0);

  auto bare = spec;
  bare.eta_cm1_A3 = 0.0;
  const auto hd = build_exciton_hamiltonian(bare);
  CHECK((hd.entries - CMatrix(hd.entries.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("global FC sign flip leaves H_T unchanged") {
  auto spec = reference_tetramer();
  const auto h = build_exciton_hamiltonian(spec);
  spec.fc_overlap_sign = -1.0;
  CHECK((build_exciton_hamiltonian(spec).entries - h.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transition dipoles") {
  auto spec = default_square_tetramer(0.0, 0.0);
  const auto mu = excitonic_transition_dipoles(spec);
  CHECK((mu.eg[1] - Vec3(0.90, 0, 0)).norm() < 1e-15);
  CHECK((mu.fg[1] - Vec3(0.74, 0, 0)).norm() < 1e-15);
  spec.chromophores[2].mu_00_D = 0.0;
  CHECK(excitonic_transition_dipoles(spec).eg[2].norm() == 0.0);
}

TEST_CASE("aggregate validation") {
  auto spec = reference_tetramer();
  CHECK_NOTHROW(spec.validate());

  auto dup = spec;
  dup.neighbor_pairs.push_back({1, 0});
  CHECK_THROWS_AS(dup.validate(), ValidationError);

  auto self = spec;
  self.neighbor_pairs.push_back({2, 2});
  CHECK_THROWS_AS(self.validate(), ValidationError);

  auto coincident = spec;
  coincident.chromophores[2].position_A = coincident.chromophores[0].position_A;
  CHECK_THROWS_AS(coincident.validate(), SingularityError);
  CHECK_THROWS_AS(build_exciton_hamiltonian(coincident), SingularityError);

  auto skew = spec;
  skew.chromophores[0].dipole_dir = Vec3(1, 1, 0);
  CHECK_THROWS_AS(skew.validate(), ValidationError);

  auto neg = spec;
  neg.chromophores[0].mu_vib_D = -0.1;
  CHECK_THROWS_AS(neg.validate(), ValidationError);

  auto vib = spec;
  vib.omega_vib_cm1 = 0.0;
  CHECK_THROWS_AS(vib.validate(), ValidationError);
}

TEST_CASE("generic ring size") {
  AggregateSpec ring;
  for (int i = 0; i < 6; ++i) {
    const double a = 2 * units::kPi * i / 6;
    ChromophoreSpec c;
    c.position_A = Vec3(4 * std::cos(a), 4 * std::sin(a), 0);
    c.dipole_dir = Vec3(-std::sin(a), std::cos(a), 0);
    ring.chromophores.push_back(c);
    ring.neighbor_pairs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>((i + 1) % 6)});
  }
  const auto h = build_exciton_hamiltonian(ring);
  CHECK(h.dim() == 13);
  CHECK(h.hermiticity_defect() == 0.0);
}
