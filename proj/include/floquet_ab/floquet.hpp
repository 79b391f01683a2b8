#pragma once

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/linalg.hpp"

#include <span>
#include <vector>

namespace floquet_ab {

// Elliptically polarized IR drive, Omega = omega_vib + detuning.
struct DriveSpec {
  double e0_V_per_m = 2.7e8;
  double detuning_cm1 = -38.5;
  double phi_x = 0.0;  // radians, kept in [0, 2 pi)
  double phi_y = 0.0;

  static DriveSpec make(double e0_V_per_m, double detuning_cm1, double phi_x, double phi_y);

  double omega_cm1(const AggregateSpec& agg) const { return agg.omega_vib_cm1 + detuning_cm1; }
  double delta_phi() const { return phi_x - phi_y; }
  void validate(const AggregateSpec& agg) const;
};

// Per-site dipoles expressed in the lab frame (Debye).
struct LabDipoles {
  std::vector<Vec3> eg;   // mu_{E_i G}
  std::vector<Vec3> fg;   // mu_{F_i G}
  std::vector<Vec3> vib;  // mu_{E_i F_i}

  std::size_t size() const noexcept { return vib.size(); }
};

// Dipoles in the aggregate frame (identity orientation).
LabDipoles aggregate_frame_dipoles(const AggregateSpec& agg);

enum class BlockKind { RwaF, RwaG, Full };

struct FloquetBlock {
  LabeledHermitian matrix;
  BlockKind kind = BlockKind::RwaF;
  int index = 1;  // photon index n for RWA blocks, truncation n_max for Full
  double omega_drive_cm1 = 0.0;
};

// -(E0/sqrt2) * kappa * (mu_x e^{-i phi_x} + mu_y e^{-i phi_y}) in cm^-1:
// the <E_i, n+1| H |F_i, n> element. z components never couple.
Complex drive_coupling_element(const Vec3& lab_vib_dipole_D, const DriveSpec& drive);

// RWA block h_{F,n} over {|E_i, n+1>, |F_i, n>} (E first, then F).
FloquetBlock build_rwa_block(const AggregateSpec& agg, const DriveSpec& drive,
                             const LabDipoles& dipoles, int n);

// h_{G,n}: the 1x1 block n * Omega.
FloquetBlock build_rwa_ground_block(const AggregateSpec& agg, const DriveSpec& drive, int n);

// Truncated Shirley Hamiltonian over photon numbers -n_max..n_max with all
// couplings of H_T and both rotating and counter-rotating drive terms.
// Ordering: for m = -n_max..n_max, {G, E_1..E_N, F_1..F_N} at photon m.
FloquetBlock build_full_floquet(const AggregateSpec& agg, const DriveSpec& drive,
                                const LabDipoles& dipoles, int n_max);

struct RwaValidity {
  double field_ratio = 0.0;     // max_i E0 kappa |mu_i,in-plane| / Omega
  double coupling_ratio = 0.0;  // max_ij |J_{E_i F_j}| / Omega
  double ratio() const { return field_ratio > coupling_ratio ? field_ratio : coupling_ratio; }
};

RwaValidity rwa_validity(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles);
double rwa_validity_ratio(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles);

struct QuasiEnergySpectrum {
  EigenSystem eigensystem;
  double omega_drive_cm1 = 0.0;
  BlockKind kind = BlockKind::RwaF;
  int index = 1;
};

QuasiEnergySpectrum quasi_energies(const FloquetBlock& block);

// One replica of every E/F quasi-energy of a full Floquet spectrum: the
// eigenvalues inside [center - Omega/2, center + Omega/2) whose eigenvectors
// have less than half their weight on G states. The default center is the
// middle of the n = 0 RWA manifold, (omega_E + Omega + omega_F) / 2.
std::vector<double> central_quasi_energies(const QuasiEnergySpectrum& full, const AggregateSpec& agg);

struct TruncationStep {
  int n_max = 0;
  double max_change_cm1 = 0.0;  // vs. the previous n_max, modulo Omega
};

// Central quasi-energies for each n_max and the change between consecutive entries.
std::vector<TruncationStep> truncation_sweep(const AggregateSpec& agg, const DriveSpec& drive,
                                             const LabDipoles& dipoles, std::span<const int> n_max_values);

// Max distance modulo Omega between central full-Floquet and RWA quasi-energies.
double full_vs_rwa_deviation(const AggregateSpec& agg, const DriveSpec& drive,
                             const LabDipoles& dipoles, int n_max);

}  // namespace floquet_ab
