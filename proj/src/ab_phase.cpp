#include "floquet_ab/ab_phase.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/linalg.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet_ab {

namespace {

// Amplitude for the hop from -> to.
Complex hop_element(const FloquetBlock& block, const BasisLabel& from, const BasisLabel& to, std::size_t hop) {
  const auto i = block.matrix.index_of(from);
  const auto j = block.matrix.index_of(to);
  if (!i || !j) {
    std::ostringstream os;
    os << "hop " << hop << " (" << from.str() << " -> " << to.str() << ") leaves the Floquet block";
    throw BrokenPathError(os.str(), hop);
  }
  const Complex v = block.matrix.entries(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(*i));
  if (std::abs(v) < kBrokenHopThreshold) {
    std::ostringstream os;
    os << "hop " << hop << " (" << from.str() << " -> " << to.str() << ") has vanishing amplitude";
    throw BrokenPathError(os.str(), hop);
  }
  return v;
}

bool is_drive_hop(const BasisLabel& a, const BasisLabel& b) {
  const auto ka = a.exciton.kind, kb = b.exciton.kind;
  const bool ef = (ka == ExcitonKind::E && kb == ExcitonKind::F) || (ka == ExcitonKind::F && kb == ExcitonKind::E);
  return ef && a.exciton.site == b.exciton.site;
}

}  // namespace

LoopPath LoopPath::reversed() const {
  return {std::vector<BasisLabel>(states.rbegin(), states.rend())};
}

void LoopPath::validate() const {
  if (states.size() < 3) throw ValidationError("loop path needs at least two hops");
  if (!(states.front() == states.back())) throw ValidationError("loop path is not closed");
}

LoopPath reference_loop(int n) {
  return {{label_e(0, n + 1), label_e(1, n + 1), label_f(1, n), label_f(2, n), label_f(3, n),
           label_e(3, n + 1), label_e(0, n + 1)}};
}

WilsonLoopResult wilson_loop(const FloquetBlock& block, const LoopPath& path) {
  path.validate();
  Complex w = 1.0;
  for (std::size_t k = 0; k < path.hops(); ++k) w *= hop_element(block, path.states[k], path.states[k + 1], k);
  WilsonLoopResult r;
  r.w = w;
  r.phase = wrap_phase(std::arg(w));
  r.phase_mod_2pi = wrap_phase_positive(r.phase);
  r.magnitude = std::abs(w);
  return r;
}

SitePhases site_phase_decomposition(const FloquetBlock& block, const LoopPath& path) {
  path.validate();
  std::vector<std::size_t> drive_hops;
  for (std::size_t k = 0; k < path.hops(); ++k)
    if (is_drive_hop(path.states[k], path.states[k + 1])) drive_hops.push_back(k);
  if (drive_hops.size() != 2) {
    std::ostringstream os;
    os << "site-phase decomposition needs exactly two drive hops, path has " << drive_hops.size();
    throw ValidationError(os.str());
  }
  const std::size_t split = (drive_hops[0] + drive_hops[1] + 1) / 2;
  Complex first = 1.0, second = 1.0;
  for (std::size_t k = 0; k < path.hops(); ++k) {
    Complex v = hop_element(block, path.states[k], path.states[k + 1], k);
    if (k == drive_hops[0] || k == drive_hops[1]) v = -v;
    (k < split ? first : second) *= v;
  }
  return {wrap_phase(std::arg(first)), wrap_phase(-std::arg(second))};
}

double equivalent_magnetic_field(double phi_rad, double loop_area_A2) {
  if (!(loop_area_A2 > 0)) throw ValidationError("loop area must be positive");
  const double area_m2 = loop_area_A2 * units::kAngstromMeter * units::kAngstromMeter;
  return phi_rad * units::kHbarJouleSecond / (units::kElementaryChargeCoulomb * area_m2);
}

IntensityReport intensity_independence_check(const AggregateSpec& agg, const DriveSpec& drive,
                                             const LabDipoles& dipoles, const LoopPath& path,
                                             std::span<const double> e0_values) {
  IntensityReport report;
  for (double e0 : e0_values) {
    DriveSpec d = drive;
    d.e0_V_per_m = e0;
    int n = 1;
    if (!path.states.empty() && path.states.front().photon) {
      const auto& s = path.states.front();
      n = s.exciton.kind == ExcitonKind::E ? *s.photon - 1 : *s.photon;
    }
    const auto w = wilson_loop(build_rwa_block(agg, d, dipoles, n), path);
    report.e0_values.push_back(e0);
    report.phases.push_back(w.phase);
    report.magnitudes.push_back(w.magnitude);
  }
  for (double p : report.phases)
    report.max_phase_deviation =
        std::max(report.max_phase_deviation, std::abs(wrap_phase(p - report.phases.front())));
  return report;
}

}  // namespace floquet_ab
