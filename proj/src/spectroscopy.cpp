#include "floquet_ab/spectroscopy.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floquet_ab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// sum_i mu^q_i c_i over the sites of one band.
Complex project(const std::vector<Vec3>& mu, const std::vector<Eigen::Index>& rows,
                const Eigen::VectorXcd& vec, int component) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) acc += mu[i](component) * vec(rows[i]);
  return acc;
}

}  // namespace

std::string to_string(Lineshape shape) {
  return shape == Lineshape::Lorentzian ? "lorentzian" : "gaussian";
}

Lineshape lineshape_from_string(const std::string& name) {
  if (name == "lorentzian") return Lineshape::Lorentzian;
  if (name == "gaussian") return Lineshape::Gaussian;
  throw ValidationError("unknown lineshape '" + name + "'");
}

double lineshape_value(Lineshape shape, double x, double gamma) {
  if (shape == Lineshape::Lorentzian) return gamma / (units::kPi * (x * x + gamma * gamma));
  // HWHM gamma -> sigma = gamma / sqrt(2 ln 2)
  const double sigma = gamma / std::sqrt(2.0 * std::log(2.0));
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * units::kPi));
}

std::vector<double> ProbeSpec::uniform_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(hi > lo)) throw ValidationError("frequency grid needs hi > lo and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo + static_cast<double>(k) * step;
  return grid;
}

ProbeSpec ProbeSpec::default_probe() {
  ProbeSpec p;
  p.omega_grid_cm1 = uniform_grid(27540.0, 28180.0, 0.25);
  return p;
}

void ProbeSpec::validate() const {
  if (omega_grid_cm1.empty()) throw ValidationError("probe frequency grid is empty");
  for (std::size_t k = 1; k < omega_grid_cm1.size(); ++k)
    if (!(omega_grid_cm1[k] > omega_grid_cm1[k - 1]))
      throw ValidationError("probe frequency grid must be strictly ascending");
  if (!(linewidth_cm1 > 0)) throw ValidationError("linewidth must be positive");
}

double SpectrumGrid::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Stick> cd_sticks(const QuasiEnergySpectrum& quasi, const LabDipoles& dipoles, double e0_probe) {
  if (quasi.kind != BlockKind::RwaF) throw ValidationError("CD needs the quasi-energies of an RWA h_F block");
  const auto& es = quasi.eigensystem;
  const std::size_t sites = dipoles.size();
  if (es.dim() != 2 * sites || dipoles.eg.size() != sites || dipoles.fg.size() != sites)
    throw ValidationError("dipole count does not match the Floquet block dimension");

  const int n = quasi.index;
  std::vector<Eigen::Index> e_rows(sites), f_rows(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    auto find = [&](const BasisLabel& l) {
      auto it = std::find(es.labels.begin(), es.labels.end(), l);
      if (it == es.labels.end()) throw ValidationError("Floquet block lacks state " + l.str());
      return static_cast<Eigen::Index>(it - es.labels.begin());
    };
    e_rows[i] = find(label_e(i, n + 1));
    f_rows[i] = find(label_f(i, n));
  }

  const double prefactor = -units::kPi * e0_probe * e0_probe;
  const double omega = quasi.omega_drive_cm1;
  std::vector<Stick> sticks;
  sticks.reserve(2 * es.dim());
  for (std::size_t lam = 0; lam < es.dim(); ++lam) {
    const Eigen::VectorXcd vec = es.vectors.col(idx(lam));
    const double eps = es.values(idx(lam));
    // Im[(sum_i mu^y_i <phi|i>) (sum_j mu^x_j <j|phi>)] with <phi|i> = conj(c_i).
    const Complex ex = project(dipoles.eg, e_rows, vec, 0);
    const Complex ey = project(dipoles.eg, e_rows, vec, 1);
    const Complex fx = project(dipoles.fg, f_rows, vec, 0);
    const Complex fy = project(dipoles.fg, f_rows, vec, 1);
    sticks.push_back({eps - (n + 1) * omega, prefactor * (std::conj(ey) * ex).imag()});
    sticks.push_back({eps - n * omega, prefactor * (std::conj(fy) * fx).imag()});
  }
  return sticks;
}

void accumulate_sticks(std::span<const Stick> sticks, const ProbeSpec& probe, std::span<double> out) {
  if (out.size() != probe.omega_grid_cm1.size()) throw ValidationError("output span does not match grid");
  for (const auto& s : sticks) {
    if (s.weight == 0.0) continue;
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] += s.weight * lineshape_value(probe.lineshape, probe.omega_grid_cm1[k] - s.omega_cm1, probe.linewidth_cm1);
  }
}

SpectrumGrid cd_single_orientation(const QuasiEnergySpectrum& quasi, const LabDipoles& dipoles, const ProbeSpec& probe) {
  probe.validate();
  SpectrumGrid g;
  g.omega_cm1 = probe.omega_grid_cm1;
  g.values.assign(g.omega_cm1.size(), 0.0);
  accumulate_sticks(cd_sticks(quasi, dipoles, probe.e0_probe_V_per_m), probe, g.values);
  g.meta.linewidth_cm1 = probe.linewidth_cm1;
  g.meta.lineshape = to_string(probe.lineshape);
  return g;
}

std::vector<Stick> absorption_sticks(const AggregateSpec& agg, double e0_probe) {
  const LabeledHermitian ht = build_exciton_hamiltonian(agg);
  const std::size_t sites = agg.size();
  const Eigen::Index dim = idx(2 * sites);
  LabeledHermitian excited;
  excited.entries = ht.entries.block(1, 1, dim, dim);
  excited.labels.assign(ht.labels.begin() + 1, ht.labels.end());
  const EigenSystem es = eigh(excited);
  const TransitionDipoles mu = excitonic_transition_dipoles(agg);

  std::vector<Stick> sticks;
  for (std::size_t lam = 0; lam < es.dim(); ++lam) {
    Eigen::Vector3cd m = Eigen::Vector3cd::Zero();
    for (std::size_t i = 0; i < sites; ++i) {
      m += es.vectors(idx(i), idx(lam)) * mu.eg[i].cast<Complex>();
      m += es.vectors(idx(sites + i), idx(lam)) * mu.fg[i].cast<Complex>();
    }
    // Isotropic average of |mu . e|^2 is |mu|^2 / 3.
    sticks.push_back({es.values(idx(lam)), units::kPi * e0_probe * e0_probe * m.squaredNorm() / 3.0});
  }
  return sticks;
}

SpectrumGrid absorption_undriven_isotropic(const AggregateSpec& agg, const ProbeSpec& probe) {
  probe.validate();
  SpectrumGrid g;
  g.omega_cm1 = probe.omega_grid_cm1;
  g.values.assign(g.omega_cm1.size(), 0.0);
  accumulate_sticks(absorption_sticks(agg, probe.e0_probe_V_per_m), probe, g.values);
  g.meta.linewidth_cm1 = probe.linewidth_cm1;
  g.meta.lineshape = to_string(probe.lineshape);
  g.meta.method = "analytic-isotropic";
  return g;
}

SpectrumGrid normalize_to_undriven_max(const SpectrumGrid& cd, const SpectrumGrid& abs_ref) {
  double ref = -std::numeric_limits<double>::infinity();
  for (double v : abs_ref.values) ref = std::max(ref, v);
  if (!(ref > 0)) throw ValidationError("absorption reference must have a positive maximum");
  SpectrumGrid out = cd;
  for (double& v : out.values) v /= ref;
  out.meta.normalization = ref;
  return out;
}

std::vector<Peak> find_peaks(const SpectrumGrid& s, double rel_threshold) {
  std::vector<Peak> peaks;
  double top = 0.0;
  for (double v : s.values) top = std::max(top, v);
  if (!(top > 0)) return peaks;
  for (std::size_t k = 1; k + 1 < s.values.size(); ++k) {
    const double v = s.values[k];
    if (v > s.values[k - 1] && v >= s.values[k + 1] && v > rel_threshold * top)
      peaks.push_back({s.omega_cm1[k], v});
  }
  return peaks;
}

BandStructure band_structure(const AggregateSpec& agg, std::span<const Stick> sticks, double dark_rel) {
  const double split = agg.omega_e_cm1 + 0.5 * agg.omega_vib_cm1;
  double top = 0.0;
  for (const auto& s : sticks) top = std::max(top, std::abs(s.weight));
  auto summarize = [&](bool upper) {
    BandSummary b;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (const auto& s : sticks) {
      if ((s.omega_cm1 >= split) != upper) continue;
      ++b.transitions;
      if (std::abs(s.weight) > dark_rel * top) ++b.bright;
      sum += s.omega_cm1;
      lo = std::min(lo, s.omega_cm1);
      hi = std::max(hi, s.omega_cm1);
    }
    if (b.transitions > 0) {
      b.center_cm1 = sum / static_cast<double>(b.transitions);
      b.spread_cm1 = hi - lo;
    }
    return b;
  };
  return {summarize(false), summarize(true)};
}

}  // namespace floquet_ab
