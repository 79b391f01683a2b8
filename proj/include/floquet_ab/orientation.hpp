#pragma once

#include "floquet_ab/core_model.hpp"
#include "floquet_ab/floquet.hpp"
#include "floquet_ab/spectroscopy.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace floquet_ab {

// z-y-z angles: theta and chi orient the aggregate normal, psi spins the
// aggregate about it.
struct Orientation {
  double chi = 0.0;    // [0, 2 pi)
  double psi = 0.0;    // [0, 2 pi)
  double theta = 0.0;  // [0, pi]

  void validate() const;
};

// R_z(chi) R_y(theta) R_z(psi); maps aggregate-frame vectors to the lab frame.
Eigen::Matrix3d rotation_matrix(const Orientation& o);

LabDipoles rotate_dipoles(const AggregateSpec& agg, const Orientation& o);

// SplitMix64 in counter mode: draw k of stream `seed` is mix(seed + (k+1) * golden).
// Any draw can be computed independently, so samples may be split across
// workers without changing results.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t bits(std::uint64_t counter) const noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t seed_;
};

// Stateful view over a CounterRng: each orientation consumes three draws.
struct OrientationStream {
  CounterRng rng;
  std::uint64_t next_sample = 0;
};

// chi, psi uniform on [0, 2 pi), cos(theta) uniform on [-1, 1].
Orientation sample_orientation(OrientationStream& stream);
Orientation sample_orientation_at(const CounterRng& rng, std::uint64_t sample_index);

struct MonteCarloPlan {
  std::size_t samples = 20000;
  std::uint64_t seed = 42;
};

// Gauss-Legendre in cos(theta), trapezoid in chi and psi.
struct QuadraturePlan {
  std::size_t n_theta = 8;
  std::size_t n_chi = 8;
  std::size_t n_psi = 8;
  double chi_offset = 0.0;
};

struct AveragingPlan {
  std::variant<MonteCarloPlan, QuadraturePlan> method = MonteCarloPlan{};
  std::optional<double> target_standard_error;  // relative to max |mean|

  static AveragingPlan monte_carlo(std::size_t samples, std::uint64_t seed);
  static AveragingPlan quadrature(std::size_t n_theta, std::size_t n_chi, std::size_t n_psi);
  void validate() const;
};

struct WeightedOrientation {
  Orientation orientation;
  double weight = 0.0;  // weights sum to one
};

// Quadrature nodes in evaluation order.
std::vector<WeightedOrientation> quadrature_nodes(const QuadraturePlan& plan);

struct OrientationAverage {
  std::vector<double> mean;
  std::vector<double> standard_error;  // zeros for quadrature
  std::size_t evaluations = 0;
  bool converged = true;  // target_standard_error met, when one is set
};

// Integrand writes its value for one orientation into `out` (pre-zeroed).
using OrientationIntegrand = std::function<void(const Orientation&, std::span<double> out)>;

// Worker count: FLOQUET_AB_WORKERS if set, else hardware concurrency.
std::size_t default_worker_count();

// Isotropic average of a vector-valued integrand. Work is split into fixed
// chunks whose partial results are combined in chunk order, so the output is
// bit-identical for any worker count.
OrientationAverage average_over_orientations(const AveragingPlan& plan, std::size_t width,
                                             const OrientationIntegrand& integrand,
                                             std::size_t workers = 0);

struct AveragedSpectrum {
  SpectrumGrid mean;
  std::vector<double> standard_error;
  bool converged = true;
};

// Orientation-averaged CD from the h_{F,1} block, re-diagonalized per orientation.
AveragedSpectrum average_cd(const AggregateSpec& agg, const DriveSpec& drive, const ProbeSpec& probe,
                            const AveragingPlan& plan, std::size_t workers = 0);

}  // namespace floquet_ab
