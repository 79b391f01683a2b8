#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floquet_ab/errors.hpp"
#include "floquet_ab/orientation.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace floquet_ab;
using doctest::Approx;

namespace {

constexpr double kPi = units::kPi;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

DriveSpec drive_with(double delta_phi) { return DriveSpec::make(2.7e8, -38.5, delta_phi, 0.0); }

// Coarser grid over both bands keeps the averaging tests quick.
ProbeSpec test_probe() {
  ProbeSpec p = ProbeSpec::default_probe();
  p.omega_grid_cm1 = ProbeSpec::uniform_grid(27600.0, 28140.0, 1.0);
  return p;
}

}  // namespace

TEST_CASE("rotation matrix conventions") {
  CHECK((rotation_matrix({0, 0, 0}) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const Vec3 z_to_x = rotation_matrix({0, 0, kPi / 2}) * Vec3::UnitZ();
  CHECK((z_to_x - Vec3::UnitX()).norm() < 1e-15);
  // theta, chi orient the aggregate normal.
  const Vec3 normal = rotation_matrix({0.7, 1.9, 0.4}) * Vec3::UnitZ();
  CHECK(normal.z() == Approx(std::cos(0.4)));
  CHECK(std::atan2(normal.y(), normal.x()) == Approx(0.7));

  const CounterRng rng(5);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Eigen::Matrix3d r = rotation_matrix(sample_orientation_at(rng, k));
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Orientation({0, 0, 4.0}).validate(), ValidationError);
  CHECK_THROWS_AS(Orientation({-0.1, 0, 1.0}).validate(), ValidationError);
}

TEST_CASE("rotated dipoles") {
  const AggregateSpec agg = reference_tetramer();
  const LabDipoles base = aggregate_frame_dipoles(agg);
  const LabDipoles same = rotate_dipoles(agg, {});
  for (std::size_t i = 0; i < 4; ++i) CHECK((same.vib[i] - base.vib[i]).norm() == 0.0);

  const CounterRng rng(9);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const LabDipoles rot = rotate_dipoles(agg, sample_orientation_at(rng, k));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(rot.eg[i].norm() == Approx(base.eg[i].norm()).epsilon(1e-12));
      CHECK(rot.fg[i].norm() == Approx(base.fg[i].norm()).epsilon(1e-12));
      CHECK(rot.vib[i].norm() == Approx(base.vib[i].norm()).epsilon(1e-12));
    }
  }

  // Edge-on: the x-directed site 2 dipole leaves the lab plane.
  const LabDipoles edge = rotate_dipoles(agg, {0, 0, kPi / 2});
  CHECK(std::hypot(edge.vib[1].x(), edge.vib[1].y()) < 1e-12);
  CHECK(std::hypot(edge.vib[3].x(), edge.vib[3].y()) == Approx(0.15));
}

TEST_CASE("orientation sampling moments and reproducibility") {
  OrientationStream stream{CounterRng(42)};
  const std::size_t n = 100000;
  double c1 = 0.0, c2 = 0.0, chi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Orientation o = sample_orientation(stream);
    o.validate();
    c1 += std::cos(o.theta);
    c2 += std::cos(o.theta) * std::cos(o.theta);
    chi += o.chi;
  }
  c1 /= n;
  c2 /= n;
  chi /= n;
  const double dn = static_cast<double>(n);
  CHECK(std::abs(c1) < 3.0 / std::sqrt(3.0 * dn));
  CHECK(std::abs(c2 - 1.0 / 3.0) < 3.0 * std::sqrt(4.0 / 45.0 / dn));
  CHECK(std::abs(chi - kPi) < 3.0 * 2 * kPi / std::sqrt(12.0 * dn));
  CHECK(stream.next_sample == n);

  // Stream and random access agree; seeds differ.
  OrientationStream again{CounterRng(42)};
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Orientation a = sample_orientation(again);
    const Orientation b = sample_orientation_at(CounterRng(42), k);
    CHECK(a.chi == b.chi);
    CHECK(a.psi == b.psi);
    CHECK(a.theta == b.theta);
  }
  CHECK(CounterRng(1).bits(0) != CounterRng(2).bits(0));
  CHECK(CounterRng(1).uniform(3) == CounterRng(1).uniform(3));
}

TEST_CASE("quadrature nodes") {
  const auto nodes = quadrature_nodes({6, 5, 4, 0.0});
  CHECK(nodes.size() == 120);
  double total = 0.0, c2 = 0.0, c4 = 0.0;
  for (const auto& w : nodes) {
    total += w.weight;
    c2 += w.weight * std::pow(std::cos(w.orientation.theta), 2);
    c4 += w.weight * std::pow(std::cos(w.orientation.theta), 4);
  }
  CHECK(total == Approx(1.0).epsilon(1e-14));
  CHECK(c2 == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c4 == Approx(1.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(AveragingPlan::monte_carlo(0, 1).validate(), ValidationError);
  CHECK_THROWS_AS(AveragingPlan::quadrature(1, 8, 8).validate(), ValidationError);
  CHECK_NOTHROW(AveragingPlan::quadrature(2, 2, 2).validate());
}

TEST_CASE("constant integrand averages to the constant") {
  const auto constant = [](const Orientation&, std::span<double> out) {
    out[0] = 2.5;
    out[1] = -1.0;
  };
  const auto mc = average_over_orientations(AveragingPlan::monte_carlo(1000, 3), 2, constant, 1);
  CHECK(mc.mean[0] == 2.5);
  CHECK(mc.mean[1] == -1.0);
  CHECK(mc.standard_error[0] == 0.0);
  CHECK(mc.evaluations == 1000);
  const auto q = average_over_orientations(AveragingPlan::quadrature(4, 4, 4), 2, constant, 1);
  CHECK(q.mean[0] == Approx(2.5).epsilon(1e-15));
}

TEST_CASE("worker count does not change results") {
  const auto integrand = [](const Orientation& o, std::span<double> out) {
    out[0] = std::sin(o.chi) * std::cos(o.theta) + 0.1 * o.psi;
    out[1] = std::cos(3 * o.theta);
  };
  const auto a = average_over_orientations(AveragingPlan::monte_carlo(3001, 17), 2, integrand, 1);
  const auto b = average_over_orientations(AveragingPlan::monte_carlo(3001, 17), 2, integrand, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  const auto qa = average_over_orientations(AveragingPlan::quadrature(9, 7, 5), 2, integrand, 1);
  const auto qb = average_over_orientations(AveragingPlan::quadrature(9, 7, 5), 2, integrand, 3);
  CHECK(qa.mean == qb.mean);
}

TEST_CASE("integrand exceptions propagate") {
  const auto bad = [](const Orientation&, std::span<double>) { throw NumericalError("boom"); };
  CHECK_THROWS_AS(average_over_orientations(AveragingPlan::monte_carlo(600, 1), 1, bad, 2), NumericalError);
}

TEST_CASE("averaged CD vanishes at time-reversal points") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  const auto ref = average_cd(agg, drive_with(kPi / 2), probe, AveragingPlan::quadrature(8, 8, 8), 1);
  const double scale = ref.mean.max_abs();
  REQUIRE(scale > 0.0);
  for (double dphi : {0.0, kPi}) {
    const auto q = average_cd(agg, drive_with(dphi), probe, AveragingPlan::quadrature(8, 8, 8), 1);
    CHECK(q.mean.max_abs() < 1e-12 * scale);
    const auto mc = average_cd(agg, drive_with(dphi), probe, AveragingPlan::monte_carlo(2000, 42), 1);
    CHECK(mc.mean.max_abs() < 1e-12 * scale);
  }
  CHECK(ref.mean.meta.method == "quadrature");
  CHECK(*ref.mean.meta.delta_phi == Approx(kPi / 2));
}

TEST_CASE("Monte Carlo and quadrature agree") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  const DriveSpec drive = drive_with(kPi / 2);
  const auto q = average_cd(agg, drive, probe, AveragingPlan::quadrature(8, 8, 8), 1);
  const auto mc = average_cd(agg, drive, probe, AveragingPlan::monte_carlo(10000, 42), 1);
  CHECK(mc.mean.meta.seed == 42u);
  CHECK(mc.mean.meta.orientation_count == 10000u);
  std::size_t outside = 0;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < q.mean.values.size(); ++k) {
    const double z = std::abs(mc.mean.values[k] - q.mean.values[k]) / mc.standard_error[k];
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++outside;
  }
  INFO("worst |z| = " << worst_z);
  CHECK(outside == 0);
}

TEST_CASE("quadrature is invariant under a global azimuthal shift") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  const DriveSpec drive = drive_with(kPi / 2);
  const auto a = average_cd(agg, drive, probe, AveragingPlan::quadrature(8, 8, 8), 1);
  AveragingPlan shifted = AveragingPlan::quadrature(8, 8, 8);
  std::get<QuadraturePlan>(shifted.method).chi_offset = 0.37;
  const auto b = average_cd(agg, drive, probe, shifted, 1);
  CHECK(max_diff(a.mean.values, b.mean.values) < 1e-9 * a.mean.max_abs());
}

TEST_CASE("quadrature converges with order") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  const DriveSpec drive = drive_with(kPi / 2);
  const auto q16 = average_cd(agg, drive, probe, AveragingPlan::quadrature(16, 16, 16), 1);
  const auto q32 = average_cd(agg, drive, probe, AveragingPlan::quadrature(32, 32, 32), 1);
  CHECK(max_diff(q16.mean.values, q32.mean.values) < 1e-6 * q32.mean.max_abs());
}

TEST_CASE("Monte Carlo standard error scales as n^-1/2") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  const DriveSpec drive = drive_with(kPi / 2);
  std::vector<double> log_n, log_se;
  for (std::size_t n : {500u, 1000u, 2000u, 4000u, 8000u}) {
    const auto mc = average_cd(agg, drive, probe, AveragingPlan::monte_carlo(n, 7), 1);
    // RMS standard error across the grid.
    double s = 0.0;
    for (double e : mc.standard_error) s += e * e;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_se.push_back(0.5 * std::log(s / static_cast<double>(mc.standard_error.size())));
  }
  const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / log_n.size();
  const double my = std::accumulate(log_se.begin(), log_se.end(), 0.0) / log_se.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < log_n.size(); ++k) {
    sxy += (log_n[k] - mx) * (log_se[k] - my);
    sxx += (log_n[k] - mx) * (log_n[k] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(std::abs(slope + 0.5) <= 0.1);
}

TEST_CASE("target standard error flags convergence") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = test_probe();
  AveragingPlan loose = AveragingPlan::monte_carlo(2000, 3);
  loose.target_standard_error = 0.5;
  AveragingPlan strict = loose;
  strict.target_standard_error = 1e-6;
  CHECK(average_cd(agg, drive_with(kPi / 2), probe, loose, 1).converged);
  CHECK_FALSE(average_cd(agg, drive_with(kPi / 2), probe, strict, 1).converged);
}
