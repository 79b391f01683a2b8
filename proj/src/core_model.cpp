#include "floquet_ab/core_model.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace floquet_ab {

namespace {

std::string site_str(std::size_t site) { return std::to_string(site + 1); }

Vec3 in_plane(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

}  // namespace

void AggregateSpec::validate() const {
  const std::size_t n = size();
  if (n < 2) throw ValidationError("aggregate needs at least two chromophores");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = chromophores[i];
    if (std::abs(c.dipole_dir.norm() - 1.0) > 1e-12)
      throw ValidationError("chromophore " + site_str(i) + ": dipole_dir is not a unit vector");
    if (c.mu_00_D < 0 || c.mu_01_D < 0 || c.mu_vib_D < 0)
      throw ValidationError("chromophore " + site_str(i) + ": negative dipole magnitude");
    if (!c.position_A.allFinite() || !c.dipole_dir.allFinite())
      throw ValidationError("chromophore " + site_str(i) + ": non-finite vector");
    for (std::size_t j = 0; j < i; ++j) {
      if ((chromophores[j].position_A - c.position_A).norm() <= 0.0)
        throw SingularityError("chromophores " + site_str(j) + " and " + site_str(i) +
                               " share a position");
    }
  }
  if (!(omega_vib_cm1 > 0)) throw ValidationError("omega_vib must be positive");
  if (!(huang_rhys >= 0)) throw ValidationError("huang_rhys must be non-negative");
  if (fc_overlap_sign != 1.0 && fc_overlap_sign != -1.0)
    throw ValidationError("fc_overlap_sign must be +1 or -1");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [i, j] : neighbor_pairs) {
    if (i >= n || j >= n) throw ValidationError("neighbor pair index out of range");
    if (i == j) throw ValidationError("neighbor pair couples a site to itself");
    if (!seen.insert(std::minmax(i, j)).second)
      throw ValidationError("duplicate neighbor pair (" + site_str(i) + "," + site_str(j) + ")");
  }
}

std::string BasisLabel::str() const {
  std::string s;
  switch (exciton.kind) {
    case ExcitonKind::G: s = "G"; break;
    case ExcitonKind::E: s = "E" + site_str(exciton.site); break;
    case ExcitonKind::F: s = "F" + site_str(exciton.site); break;
  }
  if (photon) s += "@" + std::to_string(*photon);
  return s;
}

std::vector<BasisLabel> exciton_basis(std::size_t n_sites) {
  std::vector<BasisLabel> labels;
  labels.reserve(2 * n_sites + 1);
  labels.push_back(label_g());
  for (std::size_t i = 0; i < n_sites; ++i) labels.push_back(label_e(i));
  for (std::size_t i = 0; i < n_sites; ++i) labels.push_back(label_f(i));
  return labels;
}

std::optional<std::size_t> LabeledHermitian::index_of(const BasisLabel& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

double LabeledHermitian::hermiticity_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

void LabeledHermitian::validate(double rel_tol) const {
  if (entries.rows() == 0 || entries.rows() != entries.cols())
    throw ValidationError("matrix must be square and non-empty");
  if (labels.size() != dim()) throw ValidationError("label count does not match dimension");
  const double scale = entries.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw ValidationError("matrix has non-finite entries");
  const double defect = hermiticity_defect();
  if (defect > rel_tol * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian: defect " << defect << " exceeds " << rel_tol * scale;
    throw ValidationError(os.str());
  }
}

double franck_condon_overlap(int n, double huang_rhys) {
  if (n < 0) throw ValidationError("vibrational quantum number must be non-negative");
  if (!(huang_rhys >= 0)) throw ValidationError("Huang-Rhys factor must be non-negative");
  // exp(-D) D^n / n! evaluated in log space; D^0 = 1 also for D = 0.
  const double log_factor =
      -huang_rhys - std::lgamma(n + 1.0) + (n == 0 ? 0.0 : n * std::log(huang_rhys));
  return std::sqrt(std::exp(log_factor));
}

double dipole_coupling(const ChromophoreSpec& a, const ChromophoreSpec& b, double eta_cm1_A3) {
  const Vec3 r = b.position_A - a.position_A;
  const double dist = r.norm();
  if (!(dist > 0.0)) throw SingularityError("dipole coupling between coincident positions");
  const Vec3 rhat = r / dist;
  const double orientation = a.dipole_dir.dot(b.dipole_dir) -
                             3.0 * a.dipole_dir.dot(rhat) * b.dipole_dir.dot(rhat);
  return eta_cm1_A3 * orientation / (dist * dist * dist);
}

LabeledHermitian build_exciton_hamiltonian(const AggregateSpec& spec) {
  spec.validate();
  const std::size_t n = spec.size();
  const auto e = [](std::size_t i) { return static_cast<Eigen::Index>(1 + i); };
  const auto f = [n](std::size_t i) { return static_cast<Eigen::Index>(1 + n + i); };

  LabeledHermitian h;
  h.labels = exciton_basis(n);
  h.entries = CMatrix::Zero(static_cast<Eigen::Index>(2 * n + 1), static_cast<Eigen::Index>(2 * n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    h.entries(e(i), e(i)) = spec.omega_e_cm1;
    h.entries(f(i), f(i)) = spec.omega_f_cm1();
  }

  const double s0 = spec.fc_overlap_sign * franck_condon_overlap(0, spec.huang_rhys);
  const double s1 = spec.fc_overlap_sign * franck_condon_overlap(1, spec.huang_rhys);
  for (auto [i, j] : spec.neighbor_pairs) {
    const double v = dipole_coupling(spec.chromophores[i], spec.chromophores[j], spec.eta_cm1_A3);
    const double j_ee = v * s0 * s0;
    const double j_ef = v * s0 * s1;
    const double j_ff = v * s1 * s1;
    h.entries(e(i), e(j)) = h.entries(e(j), e(i)) = j_ee;
    h.entries(f(i), f(j)) = h.entries(f(j), f(i)) = j_ff;
    h.entries(e(i), f(j)) = h.entries(f(j), e(i)) = j_ef;
    h.entries(e(j), f(i)) = h.entries(f(i), e(j)) = j_ef;
  }
  return h;
}

TransitionDipoles excitonic_transition_dipoles(const AggregateSpec& spec) {
  TransitionDipoles d;
  d.eg.reserve(spec.size());
  d.fg.reserve(spec.size());
  for (const auto& c : spec.chromophores) {
    d.eg.push_back(c.mu_00_D * c.dipole_dir);
    d.fg.push_back(c.mu_01_D * c.dipole_dir);
  }
  return d;
}

AggregateSpec default_square_tetramer(double theta1_rad, double theta3_rad) {
  constexpr double a = 3.5;
  AggregateSpec spec;
  const Vec3 positions[4] = {{0, 0, 0}, {a, 0, 0}, {a, a, 0}, {0, a, 0}};
  const Vec3 dirs[4] = {in_plane(theta1_rad), Vec3::UnitX(), in_plane(theta3_rad), Vec3::UnitY()};
  for (int i = 0; i < 4; ++i) {
    ChromophoreSpec c;
    c.position_A = positions[i];
    c.dipole_dir = dirs[i];
    spec.chromophores.push_back(c);
  }
  spec.neighbor_pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return spec;
}

AggregateSpec reference_tetramer() {
  return default_square_tetramer(units::deg_to_rad(45.0), units::deg_to_rad(315.0));
}

}  // namespace floquet_ab
