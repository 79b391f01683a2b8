#include "floquet_ab/orientation.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace floquet_ab {

namespace {

constexpr double kTwoPi = 2.0 * units::kPi;
constexpr std::size_t kChunk = 256;

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  const double c = std::cos(a), s = std::sin(a);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  const double c = std::cos(a), s = std::sin(a);
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

// Running mean and sum of squared deviations per grid point.
struct Moments {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Moments(std::size_t width) : mean(width, 0.0), m2(width, 0.0) {}

  void add(std::span<const double> x) {
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - mean[k];
      mean[k] += d * inv;
      m2[k] += d * (x[k] - mean[k]);
    }
  }

  // Pairwise combination of two partial results.
  void merge(const Moments& other) {
    if (other.count == 0) return;
    const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    const double n = na + nb;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double d = other.mean[k] - mean[k];
      mean[k] += d * nb / n;
      m2[k] += other.m2[k] + d * d * na * nb / n;
    }
    count += other.count;
  }
};

template <class ChunkFn>
void run_chunks(std::size_t chunks, std::size_t workers, ChunkFn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, chunks));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = chunks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void Orientation::validate() const {
  if (!(chi >= 0 && chi < kTwoPi) || !(psi >= 0 && psi < kTwoPi) || !(theta >= 0 && theta <= units::kPi))
    throw ValidationError("orientation angles out of range");
}

Eigen::Matrix3d rotation_matrix(const Orientation& o) {
  return rot_z(o.chi) * rot_y(o.theta) * rot_z(o.psi);
}

LabDipoles rotate_dipoles(const AggregateSpec& agg, const Orientation& o) {
  const Eigen::Matrix3d r = rotation_matrix(o);
  LabDipoles d = aggregate_frame_dipoles(agg);
  for (auto* set : {&d.eg, &d.fg, &d.vib})
    for (auto& v : *set) v = r * v;
  return d;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

Orientation sample_orientation_at(const CounterRng& rng, std::uint64_t sample_index) {
  const std::uint64_t base = 3 * sample_index;
  Orientation o;
  o.chi = kTwoPi * rng.uniform(base);
  o.psi = kTwoPi * rng.uniform(base + 1);
  const double cos_theta = std::clamp(1.0 - 2.0 * rng.uniform(base + 2), -1.0, 1.0);
  o.theta = std::acos(cos_theta);
  return o;
}

Orientation sample_orientation(OrientationStream& stream) {
  return sample_orientation_at(stream.rng, stream.next_sample++);
}

AveragingPlan AveragingPlan::monte_carlo(std::size_t samples, std::uint64_t seed) {
  AveragingPlan p;
  p.method = MonteCarloPlan{samples, seed};
  return p;
}

AveragingPlan AveragingPlan::quadrature(std::size_t n_theta, std::size_t n_chi, std::size_t n_psi) {
  AveragingPlan p;
  p.method = QuadraturePlan{n_theta, n_chi, n_psi, 0.0};
  return p;
}

void AveragingPlan::validate() const {
  if (const auto* mc = std::get_if<MonteCarloPlan>(&method)) {
    if (mc->samples == 0) throw ValidationError("Monte Carlo plan needs at least one sample");
  } else {
    const auto& q = std::get<QuadraturePlan>(method);
    if (q.n_theta < 2 || q.n_chi < 2 || q.n_psi < 2)
      throw ValidationError("quadrature orders must be at least 2");
  }
  if (target_standard_error && !(*target_standard_error > 0))
    throw ValidationError("target standard error must be positive");
}

std::vector<WeightedOrientation> quadrature_nodes(const QuadraturePlan& plan) {
  // Legendre zeros: boost returns the non-negative half in ascending order.
  const auto half = boost::math::legendre_p_zeros<double>(static_cast<int>(plan.n_theta));
  std::vector<double> x;
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    if (*it != 0.0) x.push_back(-*it);
  for (double z : half) x.push_back(z);
  std::vector<double> w;
  for (double z : x) {
    const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(plan.n_theta), z);
    w.push_back(2.0 / ((1.0 - z * z) * dp * dp));
  }

  const double norm = 1.0 / (2.0 * static_cast<double>(plan.n_chi * plan.n_psi));
  std::vector<WeightedOrientation> nodes;
  nodes.reserve(x.size() * plan.n_chi * plan.n_psi);
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (std::size_t c = 0; c < plan.n_chi; ++c) {
      for (std::size_t p = 0; p < plan.n_psi; ++p) {
        Orientation o;
        o.theta = std::acos(x[t]);
        o.chi = wrap_phase_positive(plan.chi_offset + kTwoPi * static_cast<double>(c) / static_cast<double>(plan.n_chi));
        o.psi = kTwoPi * static_cast<double>(p) / static_cast<double>(plan.n_psi);
        nodes.push_back({o, w[t] * norm});
      }
    }
  }
  return nodes;
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("FLOQUET_AB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

OrientationAverage average_over_orientations(const AveragingPlan& plan, std::size_t width,
                                             const OrientationIntegrand& integrand, std::size_t workers) {
  plan.validate();
  if (workers == 0) workers = default_worker_count();
  OrientationAverage result;

  if (const auto* mc = std::get_if<MonteCarloPlan>(&plan.method)) {
    const CounterRng rng(mc->seed);
    const std::size_t chunks = (mc->samples + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks, Moments(width));
    run_chunks(chunks, workers, [&](std::size_t c) {
      std::vector<double> buf(width);
      const std::size_t end = std::min(mc->samples, (c + 1) * kChunk);
      for (std::size_t s = c * kChunk; s < end; ++s) {
        std::fill(buf.begin(), buf.end(), 0.0);
        integrand(sample_orientation_at(rng, s), buf);
        partial[c].add(buf);
      }
    });
    Moments total(width);
    for (const auto& p : partial) total.merge(p);
    result.mean = std::move(total.mean);
    result.standard_error.resize(width);
    const double n = static_cast<double>(total.count);
    for (std::size_t k = 0; k < width; ++k)
      result.standard_error[k] = total.count > 1 ? std::sqrt(total.m2[k] / (n - 1.0) / n) : 0.0;
    result.evaluations = total.count;
    if (plan.target_standard_error) {
      double top = 0.0, worst = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        top = std::max(top, std::abs(result.mean[k]));
        worst = std::max(worst, result.standard_error[k]);
      }
      result.converged = worst <= *plan.target_standard_error * top;
    }
    return result;
  }

  const auto nodes = quadrature_nodes(std::get<QuadraturePlan>(plan.method));
  const std::size_t chunks = (nodes.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(width, 0.0));
  run_chunks(chunks, workers, [&](std::size_t c) {
    std::vector<double> buf(width);
    const std::size_t end = std::min(nodes.size(), (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      std::fill(buf.begin(), buf.end(), 0.0);
      integrand(nodes[s].orientation, buf);
      for (std::size_t k = 0; k < width; ++k) partial[c][k] += nodes[s].weight * buf[k];
    }
  });
  result.mean.assign(width, 0.0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < width; ++k) result.mean[k] += p[k];
  result.standard_error.assign(width, 0.0);
  result.evaluations = nodes.size();
  return result;
}

AveragedSpectrum average_cd(const AggregateSpec& agg, const DriveSpec& drive, const ProbeSpec& probe,
                            const AveragingPlan& plan, std::size_t workers) {
  agg.validate();
  drive.validate(agg);
  probe.validate();
  const auto integrand = [&](const Orientation& o, std::span<double> out) {
    const LabDipoles lab = rotate_dipoles(agg, o);
    const auto quasi = quasi_energies(build_rwa_block(agg, drive, lab, 1));
    accumulate_sticks(cd_sticks(quasi, lab, probe.e0_probe_V_per_m), probe, out);
  };
  const OrientationAverage avg = average_over_orientations(plan, probe.omega_grid_cm1.size(), integrand, workers);

  AveragedSpectrum out;
  out.mean.omega_cm1 = probe.omega_grid_cm1;
  out.mean.values = avg.mean;
  out.standard_error = avg.standard_error;
  out.converged = avg.converged;
  auto& meta = out.mean.meta;
  meta.orientation_count = avg.evaluations;
  meta.delta_phi = drive.delta_phi();
  meta.linewidth_cm1 = probe.linewidth_cm1;
  meta.lineshape = to_string(probe.lineshape);
  if (const auto* mc = std::get_if<MonteCarloPlan>(&plan.method)) {
    meta.seed = mc->seed;
    meta.method = "monte_carlo";
  } else {
    meta.method = "quadrature";
  }
  return out;
}

}  // namespace floquet_ab
