#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace floquet_ab {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CMatrix = Eigen::MatrixXcd;

struct ChromophoreSpec {
  Vec3 position_A = Vec3::Zero();
  Vec3 dipole_dir = Vec3::UnitX();  // unit vector, aggregate frame
  double mu_00_D = 0.90;            // |<e,0'|mu|g,0>|
  double mu_01_D = 0.74;            // |<e,1'|mu|g,0>|
  double mu_vib_D = 0.15;           // |<e,1'|mu|e,0'>|
};

struct AggregateSpec {
  std::vector<ChromophoreSpec> chromophores;
  double omega_e_cm1 = 27695.0;
  double omega_vib_cm1 = 385.0;
  double huang_rhys = 0.31;
  double eta_cm1_A3 = 982.0;
  std::vector<std::pair<std::size_t, std::size_t>> neighbor_pairs;
  // Global sign applied to every vibronic overlap <n'|0>. Only products of
  // two overlaps enter the couplings, so this is a pure gauge knob.
  double fc_overlap_sign = 1.0;

  std::size_t size() const noexcept { return chromophores.size(); }
  double omega_f_cm1() const noexcept { return omega_e_cm1 + omega_vib_cm1; }

  // Throws ValidationError / SingularityError on a broken invariant.
  void validate() const;
};

enum class ExcitonKind { G, E, F };

struct ExcitonLabel {
  ExcitonKind kind = ExcitonKind::G;
  std::size_t site = 0;  // ignored for G

  friend bool operator==(const ExcitonLabel& a, const ExcitonLabel& b) {
    return a.kind == b.kind && (a.kind == ExcitonKind::G || a.site == b.site);
  }
};

// Exciton state, optionally dressed with a Fourier (photon) index.
struct BasisLabel {
  ExcitonLabel exciton;
  std::optional<int> photon;

  std::string str() const;  // "E1", "F3@2", ... (one-based sites)
  friend bool operator==(const BasisLabel& a, const BasisLabel& b) {
    return a.exciton == b.exciton && a.photon == b.photon;
  }
};

inline BasisLabel label_g(std::optional<int> photon = std::nullopt) {
  return {{ExcitonKind::G, 0}, photon};
}
inline BasisLabel label_e(std::size_t site, std::optional<int> photon = std::nullopt) {
  return {{ExcitonKind::E, site}, photon};
}
inline BasisLabel label_f(std::size_t site, std::optional<int> photon = std::nullopt) {
  return {{ExcitonKind::F, site}, photon};
}

// Ordered {G, E_1..E_N, F_1..F_N}.
std::vector<BasisLabel> exciton_basis(std::size_t n_sites);

struct LabeledHermitian {
  CMatrix entries;
  std::vector<BasisLabel> labels;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  std::optional<std::size_t> index_of(const BasisLabel& label) const;
  // max |H_ij - conj(H_ji)|
  double hermiticity_defect() const;
  // Throws ValidationError unless square, labelled and Hermitian within
  // rel_tol * max|entry|.
  void validate(double rel_tol = 1e-10) const;
};

// <n'|0> for a displaced oscillator: sqrt(exp(-D) D^n / n!), taken positive.
double franck_condon_overlap(int n, double huang_rhys);

// Point-dipole coupling in cm^-1, without vibronic overlaps.
double dipole_coupling(const ChromophoreSpec& a, const ChromophoreSpec& b, double eta_cm1_A3);

// Undriven Hamiltonian H_T over exciton_basis(N), real symmetric, cm^-1.
LabeledHermitian build_exciton_hamiltonian(const AggregateSpec& spec);

struct TransitionDipoles {
  std::vector<Vec3> eg;  // mu_{E_i G}
  std::vector<Vec3> fg;  // mu_{F_i G}
};

TransitionDipoles excitonic_transition_dipoles(const AggregateSpec& spec);

// Square homotetramer with side 3.5 A. Sites (0,0), (a,0), (a,a), (0,a);
// site 2 along x, site 4 along y, sites 1 and 3 in-plane at theta1, theta3.
AggregateSpec default_square_tetramer(double theta1_rad, double theta3_rad);

// Reference orientation of the square: theta1 = 45 deg, theta3 = 315 deg.
AggregateSpec reference_tetramer();

}  // namespace floquet_ab
