#pragma once

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/floquet.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace floquet_ab {

enum class Lineshape { Lorentzian, Gaussian };

std::string to_string(Lineshape shape);
Lineshape lineshape_from_string(const std::string& name);

// Unit-area profile; gamma is the HWHM for both shapes.
double lineshape_value(Lineshape shape, double offset_cm1, double gamma_cm1);

struct ProbeSpec {
  double e0_probe_V_per_m = 1.0;  // enters only as |E0|^2
  std::vector<double> omega_grid_cm1;
  double linewidth_cm1 = 2.0;
  Lineshape lineshape = Lineshape::Lorentzian;

  // Inclusive uniform grid [lo, hi] with the given step.
  static std::vector<double> uniform_grid(double lo_cm1, double hi_cm1, double step_cm1);
  // 27540..28180 cm^-1 in 0.25 cm^-1 steps, Lorentzian with HWHM 2 cm^-1.
  static ProbeSpec default_probe();
  void validate() const;
};

struct SpectrumMeta {
  double normalization = 1.0;
  std::size_t orientation_count = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta_phi;
  double linewidth_cm1 = 0.0;
  std::string lineshape;
  std::string method = "single";
};

struct SpectrumGrid {
  std::vector<double> omega_cm1;
  std::vector<double> values;
  SpectrumMeta meta;

  double max_abs() const;
};

// Delta-function contribution at a transition frequency.
struct Stick {
  double omega_cm1 = 0.0;
  double weight = 0.0;
};

// Sticks of the circular-dichroism rate for one orientation. The E band of
// eigenmode lambda sits at eps - (n+1) Omega, the F band at eps - n Omega.
std::vector<Stick> cd_sticks(const QuasiEnergySpectrum& quasi, const LabDipoles& dipoles, double e0_probe_V_per_m);

// Adds sum_k weight_k * L(omega - omega_k) onto `out` (same length as the grid).
void accumulate_sticks(std::span<const Stick> sticks, const ProbeSpec& probe, std::span<double> out);

SpectrumGrid cd_single_orientation(const QuasiEnergySpectrum& quasi, const LabDipoles& dipoles, const ProbeSpec& probe);

// Isotropic absorption sticks of the undriven aggregate, one per eigenstate of
// H_T in the single-excitation space: weight pi |E0|^2 |mu_lambda G|^2 / 3.
std::vector<Stick> absorption_sticks(const AggregateSpec& agg, double e0_probe_V_per_m);

SpectrumGrid absorption_undriven_isotropic(const AggregateSpec& agg, const ProbeSpec& probe);

SpectrumGrid normalize_to_undriven_max(const SpectrumGrid& cd, const SpectrumGrid& abs_ref);

struct Peak {
  double omega_cm1 = 0.0;
  double height = 0.0;
};

// Strict local maxima above rel_threshold * max(values).
std::vector<Peak> find_peaks(const SpectrumGrid& spectrum, double rel_threshold = 1e-3);

struct BandSummary {
  double center_cm1 = 0.0;  // mean position of all transitions in the band
  double spread_cm1 = 0.0;  // max - min transition position
  std::size_t transitions = 0;
  std::size_t bright = 0;   // transitions with weight above the dark threshold
};

struct BandStructure {
  BandSummary e_band;
  BandSummary f_band;
};

// Splits sticks at omega_e + omega_vib / 2. A stick is dark when its weight is
// below dark_rel * max weight.
BandStructure band_structure(const AggregateSpec& agg, std::span<const Stick> sticks, double dark_rel = 1e-8);

}  // namespace floquet_ab
