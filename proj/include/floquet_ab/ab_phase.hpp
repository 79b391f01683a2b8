#pragma once

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/floquet.hpp"

#include <span>
#include <vector>

namespace floquet_ab {

// Closed cycle of photon-dressed states; front() == back().
struct LoopPath {
  std::vector<BasisLabel> states;

  std::size_t hops() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  LoopPath reversed() const;
  void validate() const;
};

// E1(n+1) -> E2(n+1) -> F2(n) -> F3(n) -> F4(n) -> E4(n+1) -> E1(n+1),
// sites one-based in the notation, zero-based in the labels.
LoopPath reference_loop(int n = 1);

// Elements below this magnitude (cm^-1) break a path.
inline constexpr double kBrokenHopThreshold = 1e-14;

struct WilsonLoopResult {
  Complex w;                 // cm^-(hops)
  double phase = 0.0;        // arg(w) in (-pi, pi]
  double phase_mod_2pi = 0.0;  // same angle in [0, 2 pi)
  double magnitude = 0.0;
};

// Product of hop amplitudes <s_{k+1}| h |s_k> along the path, i.e. the
// amplitude of s_0 -> s_1 -> ... -> s_0.
WilsonLoopResult wilson_loop(const FloquetBlock& block, const LoopPath& path);

struct SitePhases {
  double phi2 = 0.0;  // arg of the segment holding the first drive hop
  double phi4 = 0.0;  // minus arg of the segment holding the second
};

// Splits the loop midway between its two drive hops. Drive hops enter with
// the sign of the dialed factor (E0/sqrt2) sum_q mu^q e^{+-i phi_q}, so
// phi2 - phi4 equals the Wilson-loop phase.
SitePhases site_phase_decomposition(const FloquetBlock& block, const LoopPath& path);

// B = Phi hbar / (e * area), area in A^2.
double equivalent_magnetic_field(double phi_rad, double loop_area_A2);

struct IntensityReport {
  std::vector<double> e0_values;
  std::vector<double> phases;
  std::vector<double> magnitudes;
  double max_phase_deviation = 0.0;
};

IntensityReport intensity_independence_check(const AggregateSpec& agg, const DriveSpec& drive,
                                             const LabDipoles& dipoles, const LoopPath& path,
                                             std::span<const double> e0_values);

}  // namespace floquet_ab
