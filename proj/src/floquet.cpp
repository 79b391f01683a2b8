#include "floquet_ab/floquet.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace floquet_ab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_dipoles(const AggregateSpec& agg, const LabDipoles& dipoles) {
  const std::size_t n = agg.size();
  if (dipoles.vib.size() != n || dipoles.eg.size() != n || dipoles.fg.size() != n)
    throw ValidationError("lab dipole count does not match the aggregate size");
}

double drive_prefactor(const DriveSpec& drive) {
  return drive.e0_V_per_m * units::kDebyeVmToCm1 / std::sqrt(2.0);
}

// Counterpart of drive_coupling_element for <E_i, n| H |F_i, n+1>.
Complex counter_rotating_element(const Vec3& mu, const DriveSpec& drive) {
  return -drive_prefactor(drive) *
         (mu.x() * std::polar(1.0, drive.phi_x) + mu.y() * std::polar(1.0, drive.phi_y));
}

}  // namespace

DriveSpec DriveSpec::make(double e0_V_per_m, double detuning_cm1, double phi_x, double phi_y) {
  DriveSpec d;
  d.e0_V_per_m = e0_V_per_m;
  d.detuning_cm1 = detuning_cm1;
  d.phi_x = wrap_phase_positive(phi_x);
  d.phi_y = wrap_phase_positive(phi_y);
  return d;
}

void DriveSpec::validate(const AggregateSpec& agg) const {
  if (!(omega_cm1(agg) > 0)) throw ValidationError("drive frequency omega_vib + detuning must be positive");
  if (!std::isfinite(e0_V_per_m) || !std::isfinite(phi_x) || !std::isfinite(phi_y))
    throw ValidationError("drive parameters must be finite");
}

LabDipoles aggregate_frame_dipoles(const AggregateSpec& agg) {
  LabDipoles d;
  for (const auto& c : agg.chromophores) {
    d.eg.push_back(c.mu_00_D * c.dipole_dir);
    d.fg.push_back(c.mu_01_D * c.dipole_dir);
    d.vib.push_back(c.mu_vib_D * c.dipole_dir);
  }
  return d;
}

Complex drive_coupling_element(const Vec3& mu, const DriveSpec& drive) {
  return -drive_prefactor(drive) *
         (mu.x() * std::polar(1.0, -drive.phi_x) + mu.y() * std::polar(1.0, -drive.phi_y));
}

FloquetBlock build_rwa_block(const AggregateSpec& agg, const DriveSpec& drive,
                             const LabDipoles& dipoles, int n) {
  drive.validate(agg);
  check_dipoles(agg, dipoles);
  const LabeledHermitian ht = build_exciton_hamiltonian(agg);
  const std::size_t sites = agg.size();
  const double omega = drive.omega_cm1(agg);
  const auto e = [](std::size_t i) { return idx(i); };
  const auto f = [sites](std::size_t i) { return idx(sites + i); };
  const auto ht_e = [](std::size_t i) { return idx(1 + i); };
  const auto ht_f = [sites](std::size_t i) { return idx(1 + sites + i); };

  FloquetBlock block;
  block.kind = BlockKind::RwaF;
  block.index = n;
  block.omega_drive_cm1 = omega;
  auto& m = block.matrix;
  m.entries = CMatrix::Zero(idx(2 * sites), idx(2 * sites));
  for (std::size_t i = 0; i < sites; ++i) m.labels.push_back(label_e(i, n + 1));
  for (std::size_t i = 0; i < sites; ++i) m.labels.push_back(label_f(i, n));

  for (std::size_t i = 0; i < sites; ++i) {
    for (std::size_t j = 0; j < sites; ++j) {
      m.entries(e(i), e(j)) = ht.entries(ht_e(i), ht_e(j));
      m.entries(f(i), f(j)) = ht.entries(ht_f(i), ht_f(j));
    }
    m.entries(e(i), e(i)) += (n + 1) * omega;
    m.entries(f(i), f(i)) += n * omega;
    const Complex d = drive_coupling_element(dipoles.vib[i], drive);
    m.entries(e(i), f(i)) = d;
    m.entries(f(i), e(i)) = std::conj(d);
  }
  return block;
}

FloquetBlock build_rwa_ground_block(const AggregateSpec& agg, const DriveSpec& drive, int n) {
  drive.validate(agg);
  FloquetBlock block;
  block.kind = BlockKind::RwaG;
  block.index = n;
  block.omega_drive_cm1 = drive.omega_cm1(agg);
  block.matrix.entries = CMatrix::Constant(1, 1, n * block.omega_drive_cm1);
  block.matrix.labels = {label_g(n)};
  return block;
}

FloquetBlock build_full_floquet(const AggregateSpec& agg, const DriveSpec& drive,
                                const LabDipoles& dipoles, int n_max) {
  if (n_max < 0) throw ValidationError("Floquet truncation n_max must be non-negative");
  drive.validate(agg);
  check_dipoles(agg, dipoles);
  const LabeledHermitian ht = build_exciton_hamiltonian(agg);
  const std::size_t sites = agg.size();
  const std::size_t local = ht.dim();
  const std::size_t blocks = static_cast<std::size_t>(2 * n_max + 1);
  const double omega = drive.omega_cm1(agg);

  FloquetBlock block;
  block.kind = BlockKind::Full;
  block.index = n_max;
  block.omega_drive_cm1 = omega;
  auto& m = block.matrix;
  m.entries = CMatrix::Zero(idx(local * blocks), idx(local * blocks));
  m.labels.reserve(local * blocks);

  const auto offset = [&](int photon) { return idx(static_cast<std::size_t>(photon + n_max) * local); };
  for (int photon = -n_max; photon <= n_max; ++photon) {
    for (const auto& l : ht.labels) m.labels.push_back({l.exciton, photon});
    const Eigen::Index o = offset(photon);
    m.entries.block(o, o, idx(local), idx(local)) = ht.entries;
    for (std::size_t k = 0; k < local; ++k) m.entries(o + idx(k), o + idx(k)) += photon * omega;
  }

  std::vector<Complex> rotating(sites), counter(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    rotating[i] = drive_coupling_element(dipoles.vib[i], drive);
    counter[i] = counter_rotating_element(dipoles.vib[i], drive);
  }
  // Site i: E at local index 1 + i, F at 1 + N + i.
  for (int photon = -n_max; photon < n_max; ++photon) {
    const Eigen::Index lo = offset(photon);
    const Eigen::Index hi = offset(photon + 1);
    for (std::size_t i = 0; i < sites; ++i) {
      const Eigen::Index e = idx(1 + i);
      const Eigen::Index f = idx(1 + sites + i);
      // |E_i, m+1><F_i, m|
      m.entries(hi + e, lo + f) = rotating[i];
      m.entries(lo + f, hi + e) = std::conj(rotating[i]);
      // |E_i, m><F_i, m+1|
      m.entries(lo + e, hi + f) = counter[i];
      m.entries(hi + f, lo + e) = std::conj(counter[i]);
    }
  }
  return block;
}

RwaValidity rwa_validity(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles) {
  drive.validate(agg);
  check_dipoles(agg, dipoles);
  const double omega = drive.omega_cm1(agg);
  RwaValidity r;
  for (const auto& mu : dipoles.vib) {
    const double in_plane = std::hypot(mu.x(), mu.y());
    r.field_ratio = std::max(r.field_ratio, std::abs(drive.e0_V_per_m) * units::kDebyeVmToCm1 * in_plane / omega);
  }
  const LabeledHermitian ht = build_exciton_hamiltonian(agg);
  const std::size_t sites = agg.size();
  for (std::size_t i = 0; i < sites; ++i)
    for (std::size_t j = 0; j < sites; ++j)
      r.coupling_ratio = std::max(r.coupling_ratio, std::abs(ht.entries(idx(1 + i), idx(1 + sites + j))) / omega);
  return r;
}

double rwa_validity_ratio(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles) {
  return rwa_validity(agg, drive, dipoles).ratio();
}

QuasiEnergySpectrum quasi_energies(const FloquetBlock& block) {
  QuasiEnergySpectrum q;
  q.eigensystem = eigh(block.matrix);
  q.omega_drive_cm1 = block.omega_drive_cm1;
  q.kind = block.kind;
  q.index = block.index;
  return q;
}

std::vector<double> central_quasi_energies(const QuasiEnergySpectrum& full, const AggregateSpec& agg) {
  if (full.kind != BlockKind::Full) throw ValidationError("central window needs a full Floquet spectrum");
  const double omega = full.omega_drive_cm1;
  const double center = 0.5 * (agg.omega_e_cm1 + omega + agg.omega_f_cm1());
  const auto& es = full.eigensystem;
  std::vector<double> out;
  for (std::size_t k = 0; k < es.dim(); ++k) {
    const double value = es.values(idx(k));
    if (value < center - 0.5 * omega || value >= center + 0.5 * omega) continue;
    double g_weight = 0.0;
    for (std::size_t r = 0; r < es.dim(); ++r)
      if (es.labels[r].exciton.kind == ExcitonKind::G) g_weight += std::norm(es.vectors(idx(r), idx(k)));
    if (g_weight < 0.5) out.push_back(value);
  }
  return out;
}

std::vector<TruncationStep> truncation_sweep(const AggregateSpec& agg, const DriveSpec& drive,
                                             const LabDipoles& dipoles, std::span<const int> n_max_values) {
  std::vector<TruncationStep> steps;
  std::vector<double> previous;
  const double omega = drive.omega_cm1(agg);
  for (int n_max : n_max_values) {
    const auto central = central_quasi_energies(quasi_energies(build_full_floquet(agg, drive, dipoles, n_max)), agg);
    TruncationStep step;
    step.n_max = n_max;
    if (!previous.empty()) {
      step.max_change_cm1 = previous.size() == central.size()
                                ? match_on_circle(previous, central, omega).max_distance
                                : std::numeric_limits<double>::infinity();
    }
    steps.push_back(step);
    previous = central;
  }
  return steps;
}

double full_vs_rwa_deviation(const AggregateSpec& agg, const DriveSpec& drive,
                             const LabDipoles& dipoles, int n_max) {
  const auto central = central_quasi_energies(quasi_energies(build_full_floquet(agg, drive, dipoles, n_max)), agg);
  const auto rwa = quasi_energies(build_rwa_block(agg, drive, dipoles, 1));
  std::vector<double> rwa_values(rwa.eigensystem.values.data(),
                                 rwa.eigensystem.values.data() + rwa.eigensystem.values.size());
  if (central.size() != rwa_values.size()) {
    std::ostringstream os;
    os << "central Floquet window holds " << central.size() << " quasi-energies, expected "
       << rwa_values.size();
    throw NumericalError(os.str());
  }
  return match_on_circle(central, rwa_values, drive.omega_cm1(agg)).max_distance;
}

}  // namespace floquet_ab
