#include "floquet_ab/tdse.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/linalg.hpp"
#include "floquet_ab/units.hpp"

#include <cmath>
#include <sstream>

namespace floquet_ab {

namespace {

struct SplitHamiltonian {
  CMatrix static_part;          // H_T restricted to {E, F}
  std::vector<Complex> coeff_x;  // -sqrt2 E0 kappa mu^x_i
  std::vector<Complex> coeff_y;
  double omega = 0.0;
  double phi_x = 0.0, phi_y = 0.0;
  std::size_t sites = 0;

  void fill(double t, CMatrix& h) const {
    h = static_part;
    const double cx = std::cos(omega * t - phi_x);
    const double cy = std::cos(omega * t - phi_y);
    for (std::size_t i = 0; i < sites; ++i) {
      const Complex v = coeff_x[i] * cx + coeff_y[i] * cy;
      const auto e = static_cast<Eigen::Index>(i);
      const auto f = static_cast<Eigen::Index>(sites + i);
      h(e, f) += v;
      h(f, e) += std::conj(v);
    }
  }
};

SplitHamiltonian split(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles) {
  drive.validate(agg);
  const std::size_t sites = agg.size();
  if (dipoles.vib.size() != sites) throw ValidationError("lab dipole count does not match the aggregate size");
  const LabeledHermitian ht = build_exciton_hamiltonian(agg);
  SplitHamiltonian s;
  s.sites = sites;
  const auto dim = static_cast<Eigen::Index>(2 * sites);
  s.static_part = ht.entries.block(1, 1, dim, dim);
  s.omega = drive.omega_cm1(agg);
  s.phi_x = drive.phi_x;
  s.phi_y = drive.phi_y;
  const double amp = -std::sqrt(2.0) * drive.e0_V_per_m * units::kDebyeVmToCm1;
  for (const auto& mu : dipoles.vib) {
    s.coeff_x.push_back(amp * mu.x());
    s.coeff_y.push_back(amp * mu.y());
  }
  return s;
}

}  // namespace

LabeledHermitian build_time_hamiltonian(const AggregateSpec& agg, const DriveSpec& drive,
                                        const LabDipoles& dipoles, double t) {
  const SplitHamiltonian s = split(agg, drive, dipoles);
  LabeledHermitian h;
  s.fill(t, h.entries);
  for (std::size_t i = 0; i < s.sites; ++i) h.labels.push_back(label_e(i));
  for (std::size_t i = 0; i < s.sites; ++i) h.labels.push_back(label_f(i));
  return h;
}

PropagatorResult propagate_period(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles,
                                  int steps, int periods) {
  if (steps < 1000) throw ValidationError("propagation needs at least 1000 steps per period");
  if (periods < 1) throw ValidationError("propagation needs at least one period");
  SplitHamiltonian s = split(agg, drive, dipoles);
  const Eigen::Index dim = s.static_part.rows();

  // Remove the mean diagonal energy; it only contributes a global phase.
  const double offset = s.static_part.diagonal().real().mean();
  s.static_part.diagonal().array() -= offset;

  const double period = 2.0 * units::kPi / s.omega;
  const double dt = period / steps;
  const Complex minus_i(0.0, -1.0);
  CMatrix u = CMatrix::Identity(dim, dim);
  CMatrix h(dim, dim), k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
  const long total = static_cast<long>(steps) * periods;
  for (long step = 0; step < total; ++step) {
    // Time within the current period keeps cos arguments small and exact at boundaries.
    const double t = dt * static_cast<double>(step % steps);
    s.fill(t, h);
    k1.noalias() = minus_i * (h * u);
    s.fill(t + 0.5 * dt, h);
    k2.noalias() = minus_i * (h * (u + 0.5 * dt * k1));
    k3.noalias() = minus_i * (h * (u + 0.5 * dt * k2));
    s.fill(t + dt, h);
    k4.noalias() = minus_i * (h * (u + dt * k3));
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  PropagatorResult r;
  r.steps = steps;
  r.periods = periods;
  r.period = period;
  r.unitarity_defect = unitarity_defect(u);
  r.u_period = std::polar(1.0, -offset * period * periods) * u;
  if (!(r.unitarity_defect < kMaxUnitarityDefect)) {
    std::ostringstream os;
    os << "propagator unitarity defect " << r.unitarity_defect << " exceeds " << kMaxUnitarityDefect
       << " with " << steps << " steps per period";
    throw StepSizeError(os.str(), r.unitarity_defect);
  }
  return r;
}

QuasiEnergyComparison compare_quasi_energies(const PropagatorResult& prop, std::span<const double> eps) {
  if (static_cast<std::size_t>(prop.u_period.rows()) != eps.size()) {
    std::ostringstream os;
    os << "propagator dimension " << prop.u_period.rows() << " does not match " << eps.size() << " quasi-energies";
    throw ValidationError(os.str());
  }
  QuasiEnergyComparison c;
  c.propagator_phases = unitary_eigenphases(prop.u_period);
  const double t = prop.period * prop.periods;
  for (double e : eps) c.floquet_phases.push_back(wrap_phase(-e * t));
  const CircularMatch m = match_on_circle(c.propagator_phases, c.floquet_phases, 2.0 * units::kPi);
  c.max_distance = m.max_distance;
  c.mean_distance = m.mean_distance;
  return c;
}

QuasiEnergyComparison compare_quasi_energies(const PropagatorResult& prop, const QuasiEnergySpectrum& quasi,
                                             const AggregateSpec& agg) {
  if (quasi.kind == BlockKind::Full) {
    const auto central = central_quasi_energies(quasi, agg);
    return compare_quasi_energies(prop, central);
  }
  const auto& v = quasi.eigensystem.values;
  return compare_quasi_energies(prop, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace floquet_ab
