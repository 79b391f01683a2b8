#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floquet_ab/errors.hpp"
#include "floquet_ab/floquet.hpp"
#include "floquet_ab/orientation.hpp"
#include "floquet_ab/spectroscopy.hpp"
#include "floquet_ab/units.hpp"
#include "oracles.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>

using namespace floquet_ab;
using doctest::Approx;

namespace {

constexpr double kPi = units::kPi;

DriveSpec drive_with(double delta_phi, double e0 = 2.7e8) {
  return DriveSpec::make(e0, -38.5, delta_phi, 0.0);
}

struct Setup {
  AggregateSpec agg = reference_tetramer();
  LabDipoles dip;
  QuasiEnergySpectrum quasi;
};

Setup setup(double delta_phi, const Orientation& o = {}, double e0 = 2.7e8) {
  Setup s;
  s.dip = rotate_dipoles(s.agg, o);
  s.quasi = quasi_energies(build_rwa_block(s.agg, drive_with(delta_phi, e0), s.dip, 1));
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

const std::vector<Orientation> kOrientations = {
    {0.0, 0.0, 0.0}, {0.4, 1.3, 0.8}, {2.9, 5.1, 2.2}, {4.4, 0.2, 1.57}, {1.0, 3.0, 3.0}};

// Peak CD magnitude over the test orientations at delta_phi = pi/2. Edge-on
// orientations have almost no in-plane response, so per-orientation
// tolerances are quoted against this common scale.
double peak_scale() {
  const ProbeSpec probe = ProbeSpec::default_probe();
  double scale = 0.0;
  for (const auto& o : kOrientations) {
    const Setup s = setup(kPi / 2, o);
    scale = std::max(scale, cd_single_orientation(s.quasi, s.dip, probe).max_abs());
  }
  return scale;
}

}  // namespace

TEST_CASE("lineshapes have unit area") {
  boost::math::quadrature::sinh_sinh<double> integrator;
  for (auto shape : {Lineshape::Lorentzian, Lineshape::Gaussian}) {
    for (double gamma : {0.5, 2.0, 7.0}) {
      const double area = integrator.integrate([&](double x) { return lineshape_value(shape, x, gamma); });
      CHECK(area == Approx(1.0).epsilon(1e-6));
      // HWHM: half the peak height at x = gamma.
      CHECK(lineshape_value(shape, gamma, gamma) == Approx(0.5 * lineshape_value(shape, 0.0, gamma)).epsilon(1e-12));
    }
  }
  CHECK(lineshape_from_string("gaussian") == Lineshape::Gaussian);
  CHECK(to_string(Lineshape::Lorentzian) == "lorentzian");
  CHECK_THROWS_AS(lineshape_from_string("voigt"), ValidationError);
}

TEST_CASE("probe grid") {
  const ProbeSpec p = ProbeSpec::default_probe();
  CHECK(p.omega_grid_cm1.size() == 2561);
  CHECK(p.omega_grid_cm1.front() == 27540.0);
  CHECK(p.omega_grid_cm1.back() == Approx(28180.0));
  ProbeSpec bad = p;
  bad.linewidth_cm1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  std::swap(bad.omega_grid_cm1[3], bad.omega_grid_cm1[4]);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("CD sticks match a direct evaluation of the response formula") {
  for (const auto& o : kOrientations) {
    const Setup s = setup(kPi / 2, o);
    const FloquetBlock block = build_rwa_block(s.agg, drive_with(kPi / 2), s.dip, 1);
    Eigen::SelfAdjointEigenSolver<CMatrix> ref(block.matrix.entries);
    std::vector<Stick> expected;
    for (int lam = 0; lam < 8; ++lam) {
      const auto v = ref.eigenvectors().col(lam);
      Complex ey = 0, ex = 0, fy = 0, fx = 0;
      for (int i = 0; i < 4; ++i) {
        ey += s.dip.eg[static_cast<std::size_t>(i)].y() * v(i);
        ex += s.dip.eg[static_cast<std::size_t>(i)].x() * v(i);
        fy += s.dip.fg[static_cast<std::size_t>(i)].y() * v(4 + i);
        fx += s.dip.fg[static_cast<std::size_t>(i)].x() * v(4 + i);
      }
      const double eps = ref.eigenvalues()(lam);
      expected.push_back({eps - 2 * 346.5, -kPi * (std::conj(ey) * ex).imag()});
      expected.push_back({eps - 346.5, -kPi * (std::conj(fy) * fx).imag()});
    }
    auto got = cd_sticks(s.quasi, s.dip, 1.0);
    REQUIRE(got.size() == expected.size());
    const auto by_omega = [](const Stick& a, const Stick& b) { return a.omega_cm1 < b.omega_cm1; };
    std::sort(got.begin(), got.end(), by_omega);
    std::sort(expected.begin(), expected.end(), by_omega);
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].omega_cm1 == Approx(expected[k].omega_cm1).epsilon(1e-12));
      CHECK(std::abs(got[k].weight - expected[k].weight) < 1e-10);
    }
  }
}

TEST_CASE("CD vanishes without drive or at time-reversal points") {
  const ProbeSpec probe = ProbeSpec::default_probe();
  const double scale = peak_scale();
  REQUIRE(scale > 1e-3);
  for (const auto& o : kOrientations) {
    const Setup off = setup(kPi / 2, o, 0.0);
    CHECK(max_abs(cd_single_orientation(off.quasi, off.dip, probe).values) < 1e-14);
    for (double dphi : {0.0, kPi}) {
      const Setup s = setup(dphi, o);
      CHECK(max_abs(cd_single_orientation(s.quasi, s.dip, probe).values) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("ellipticity antisymmetry") {
  const ProbeSpec probe = ProbeSpec::default_probe();
  const double scale = peak_scale();
  for (const auto& o : kOrientations) {
    for (double dphi : {kPi / 2, 0.7, 2.4}) {
      const Setup a = setup(dphi, o);
      const Setup b = setup(-dphi, o);
      const auto sa = cd_single_orientation(a.quasi, a.dip, probe);
      const auto sb = cd_single_orientation(b.quasi, b.dip, probe);
      double worst = 0.0;
      for (std::size_t k = 0; k < sa.values.size(); ++k) worst = std::max(worst, std::abs(sa.values[k] + sb.values[k]));
      CHECK(worst <= 1e-10 * scale);
    }
  }
}

TEST_CASE("reference geometry gives CD in both bands") {
  const Setup s = setup(kPi / 2);
  const auto cd = cd_single_orientation(s.quasi, s.dip, ProbeSpec::default_probe());
  double e_band = 0.0, f_band = 0.0;
  for (std::size_t k = 0; k < cd.omega_cm1.size(); ++k) {
    if (cd.omega_cm1[k] < 27695 + 192.5)
      e_band = std::max(e_band, std::abs(cd.values[k]));
    else
      f_band = std::max(f_band, std::abs(cd.values[k]));
  }
  CHECK(e_band > 1e-3 * cd.max_abs());
  CHECK(f_band > 1e-3 * cd.max_abs());
}

TEST_CASE("CD is linear in probe intensity") {
  const Setup s = setup(kPi / 2, kOrientations[1]);
  ProbeSpec p1 = ProbeSpec::default_probe();
  ProbeSpec p3 = p1;
  p3.e0_probe_V_per_m = 3.0;
  const auto a = cd_single_orientation(s.quasi, s.dip, p1);
  const auto b = cd_single_orientation(s.quasi, s.dip, p3);
  for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(b.values[k] == Approx(9.0 * a.values[k]).epsilon(1e-12));
}

TEST_CASE("CD is invariant under rotations inside degenerate eigenspaces") {
  // Force two degenerate pairs in a generic spectrum. Mixing the paired
  // eigenvectors by any unitary must leave the stick sum at that energy alone.
  Setup s = setup(kPi / 2, kOrientations[1]);
  auto& values = s.quasi.eigensystem.values;
  values(1) = values(0);
  values(6) = values(5);

  QuasiEnergySpectrum rotated = s.quasi;
  auto& vec = rotated.eigensystem.vectors;
  vec.middleCols(0, 2) = s.quasi.eigensystem.vectors.middleCols(0, 2) * oracle::random_unitary(2, 21);
  vec.middleCols(5, 2) = s.quasi.eigensystem.vectors.middleCols(5, 2) * oracle::random_unitary(2, 22);
  CHECK((vec - s.quasi.eigensystem.vectors).cwiseAbs().maxCoeff() > 0.1);

  const ProbeSpec probe = ProbeSpec::default_probe();
  const auto a = cd_single_orientation(s.quasi, s.dip, probe);
  const auto b = cd_single_orientation(rotated, s.dip, probe);
  REQUIRE(a.max_abs() > 1e-3);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  CHECK(worst <= 1e-10 * a.max_abs());
}

TEST_CASE("undriven isotropic absorption") {
  const ProbeSpec probe = ProbeSpec::default_probe();

  SUBCASE("uncoupled monomers give two peaks with dipole-squared weights") {
    AggregateSpec agg = reference_tetramer();
    agg.eta_cm1_A3 = 0.0;
    const auto sticks = absorption_sticks(agg, 1.0);
    double e_weight = 0.0, f_weight = 0.0;
    for (const auto& s : sticks) (s.omega_cm1 < 27900 ? e_weight : f_weight) += s.weight;
    CHECK(e_weight / f_weight == Approx((0.90 * 0.90) / (0.74 * 0.74)).epsilon(1e-12));
    CHECK(e_weight == Approx(kPi * 4 * 0.81 / 3).epsilon(1e-12));
    const auto spectrum = absorption_undriven_isotropic(agg, probe);
    const auto peaks = find_peaks(spectrum);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].omega_cm1 == Approx(27695.0));
    CHECK(peaks[1].omega_cm1 == Approx(28080.0));
  }

  SUBCASE("coupled tetramer: split bands and dark states") {
    const AggregateSpec agg = reference_tetramer();
    const auto sticks = absorption_sticks(agg, 1.0);
    CHECK(sticks.size() == 8);
    const BandStructure bands = band_structure(agg, sticks);
    CHECK(bands.e_band.transitions == 4);
    CHECK(bands.f_band.transitions == 4);
    CHECK(bands.e_band.bright < 4);
    CHECK(std::abs(bands.e_band.center_cm1 - 27695.0) < probe.linewidth_cm1);
    CHECK(std::abs(bands.f_band.center_cm1 - 28080.0) < probe.linewidth_cm1);
    CHECK(bands.e_band.spread_cm1 / bands.f_band.spread_cm1 == Approx(1.0 / 0.31).epsilon(0.05));

    const auto spectrum = absorption_undriven_isotropic(agg, probe);
    CHECK(find_peaks(spectrum).size() < 8);
  }
}

TEST_CASE("normalization") {
  const AggregateSpec agg = reference_tetramer();
  const ProbeSpec probe = ProbeSpec::default_probe();
  const auto abs_ref = absorption_undriven_isotropic(agg, probe);
  const auto self = normalize_to_undriven_max(abs_ref, abs_ref);
  CHECK(self.max_abs() == Approx(1.0).epsilon(1e-15));
  CHECK(self.meta.normalization == Approx(abs_ref.max_abs()));

  SpectrumGrid zero = abs_ref;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK(normalize_to_undriven_max(zero, abs_ref).max_abs() == 0.0);
  CHECK_THROWS_AS(normalize_to_undriven_max(abs_ref, zero), ValidationError);

  const Setup s = setup(kPi / 2);
  ProbeSpec strong = probe;
  strong.e0_probe_V_per_m = 2.0;
  const auto n1 = normalize_to_undriven_max(cd_single_orientation(s.quasi, s.dip, probe), abs_ref);
  const auto n2 = normalize_to_undriven_max(cd_single_orientation(s.quasi, s.dip, strong),
                                            absorption_undriven_isotropic(agg, strong));
  for (std::size_t k = 0; k < n1.values.size(); ++k) CHECK(n2.values[k] == Approx(n1.values[k]).epsilon(1e-12));
}

TEST_CASE("CD requires an RWA E/F block") {
  const Setup s = setup(kPi / 2);
  QuasiEnergySpectrum wrong = s.quasi;
  wrong.kind = BlockKind::Full;
  CHECK_THROWS_AS(cd_sticks(wrong, s.dip, 1.0), ValidationError);
}
