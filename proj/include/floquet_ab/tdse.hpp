#pragma once

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/floquet.hpp"

#include <span>
#include <vector>

namespace floquet_ab {

// H_LD(t) on the 2N-dim {E_i, F_i} space (G decouples), t in (cm^-1)^-1.
// The real drive field is the one whose Fourier components reproduce the
// Floquet couplings of build_full_floquet:
//   <E_i| H |F_i> = -sqrt2 E0 kappa sum_q mu^q cos(Omega t - phi_q).
LabeledHermitian build_time_hamiltonian(const AggregateSpec& agg, const DriveSpec& drive,
                                        const LabDipoles& dipoles, double t);

struct PropagatorResult {
  CMatrix u_period;  // U(periods * T)
  int steps = 0;     // RK4 steps per period
  int periods = 1;
  double period = 0.0;  // T = 2 pi / Omega
  double unitarity_defect = 0.0;
};

inline constexpr double kMaxUnitarityDefect = 1e-8;

// Fixed-step RK4 for dU/dt = -i H(t) U. A constant energy offset is removed
// from H during stepping and restored as an exact scalar phase.
// Throws StepSizeError when the unitarity defect exceeds kMaxUnitarityDefect.
PropagatorResult propagate_period(const AggregateSpec& agg, const DriveSpec& drive, const LabDipoles& dipoles,
                                  int steps = 20000, int periods = 1);

struct QuasiEnergyComparison {
  double max_distance = 0.0;   // radians on the unit circle
  double mean_distance = 0.0;
  std::vector<double> propagator_phases;
  std::vector<double> floquet_phases;  // -eps T, wrapped
};

// Compares eigenphases of U(T) with -eps T mod 2 pi.
QuasiEnergyComparison compare_quasi_energies(const PropagatorResult& prop, std::span<const double> quasi_energies_cm1);

// RWA spectra are used whole; full spectra through central_quasi_energies.
QuasiEnergyComparison compare_quasi_energies(const PropagatorResult& prop, const QuasiEnergySpectrum& quasi,
                                             const AggregateSpec& agg);

}  // namespace floquet_ab
