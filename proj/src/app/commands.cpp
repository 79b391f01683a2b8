#include "floquet_ab/app/commands.hpp"

#include "floquet_ab/tdse.hpp"
#include "floquet_ab/units.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace floquet_ab::app {

namespace {

constexpr double kTwoPi = 2.0 * units::kPi;

// Thresholds of the validate command.
constexpr double kRwaRatioMax = 0.1;
constexpr double kFullVsRwaMaxOmega = 0.01;
constexpr double kTruncationMaxOmega = 1e-6;
constexpr double kTdseFullMaxRad = 1e-6 * kTwoPi;
constexpr double kTdseRwaMaxRad = 0.01 * kTwoPi;
constexpr double kExactExponentialMax = 1e-10;

std::vector<double> to_rad(const std::vector<double>& deg) {
  std::vector<double> out;
  for (double d : deg) out.push_back(units::deg_to_rad(d));
  return out;
}

Json peaks_json(const std::vector<Peak>& peaks) {
  Json j = Json::array();
  for (const auto& p : peaks) j.push_back({{"omega_cm1", p.omega_cm1}, {"height", p.height}});
  return j;
}

Json band_json(const BandSummary& b) {
  return {{"center_cm1", b.center_cm1}, {"spread_cm1", b.spread_cm1}, {"transitions", b.transitions}, {"bright", b.bright}};
}

}  // namespace

AbsorptionResult compute_absorption(const Scenario& s) {
  const AggregateSpec agg = s.aggregate.build();
  const ProbeSpec probe = s.probe.build();
  AbsorptionResult r;
  const SpectrumGrid raw = absorption_undriven_isotropic(agg, probe);
  r.spectrum = normalize_to_undriven_max(raw, raw);
  r.sticks = absorption_sticks(agg, probe.e0_probe_V_per_m);
  r.peaks = find_peaks(r.spectrum);
  r.bands = band_structure(agg, r.sticks);
  return r;
}

CdMap compute_cd_map(const Scenario& s, std::size_t workers) {
  const AggregateSpec agg = s.aggregate.build();
  const ProbeSpec probe = s.probe.build();
  const AveragingPlan plan = s.averaging.build();
  const SpectrumGrid abs_ref = absorption_undriven_isotropic(agg, probe);
  CdMap map;
  map.omega_cm1 = probe.omega_grid_cm1;
  map.delta_phi_rad = to_rad(s.sweep.delta_phi_deg);
  for (double dphi : map.delta_phi_rad) {
    const AveragedSpectrum avg = average_cd(agg, s.drive.build_with_delta_phi(dphi), probe, plan, workers);
    const SpectrumGrid norm = normalize_to_undriven_max(avg.mean, abs_ref);
    map.normalization = norm.meta.normalization;
    map.meta = norm.meta;
    map.values.push_back(norm.values);
    std::vector<double> se = avg.standard_error;
    for (double& v : se) v /= map.normalization;
    map.standard_error.push_back(std::move(se));
  }
  map.meta.delta_phi.reset();
  return map;
}

double loop_area_A2(const AggregateSpec& agg, const LoopPath& path) {
  std::vector<std::size_t> sites;
  for (const auto& st : path.states) {
    if (st.exciton.kind == ExcitonKind::G) continue;
    if (sites.empty() || sites.back() != st.exciton.site) sites.push_back(st.exciton.site);
  }
  while (sites.size() > 1 && sites.front() == sites.back()) sites.pop_back();
  Vec3 twice_area = Vec3::Zero();
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Vec3& a = agg.chromophores.at(sites[k]).position_A;
    const Vec3& b = agg.chromophores.at(sites[(k + 1) % sites.size()]).position_A;
    twice_area += a.cross(b);
  }
  return 0.5 * twice_area.norm();
}

namespace {

AbRow evaluate_loop(const AggregateSpec& agg, const DriveSpec& drive, const LoopPath& path, double area) {
  AbRow row;
  row.delta_phi_rad = wrap_phase_positive(drive.delta_phi());
  try {
    const int n = path.states.front().photon
                      ? (path.states.front().exciton.kind == ExcitonKind::E ? *path.states.front().photon - 1
                                                                          : *path.states.front().photon)
                      : 1;
    const FloquetBlock block = build_rwa_block(agg, drive, aggregate_frame_dipoles(agg), n);
    row.loop = wilson_loop(block, path);
    try {
      row.sites = site_phase_decomposition(block, path);
    } catch (const ValidationError&) {
      // Only loops with exactly two drive hops have a site decomposition.
    }
    row.field_T = area > 0 ? equivalent_magnetic_field(row.loop->phase, area) : 0.0;
  } catch (const BrokenPathError& e) {
    row.status = fmt::format("broken at hop {}", e.hop());
  }
  return row;
}

}  // namespace

AbSweep compute_ab_sweep(const Scenario& s) {
  const AggregateSpec agg = s.aggregate.build();
  const LoopPath path = s.sweep.build_loop();
  AbSweep sweep;
  sweep.loop_area_A2 = loop_area_A2(agg, path);
  for (double dphi : to_rad(s.sweep.delta_phi_deg)) {
    AbRow row = evaluate_loop(agg, s.drive.build_with_delta_phi(dphi), path, sweep.loop_area_A2);
    row.delta_phi_rad = dphi;
    row.theta1_deg = s.aggregate.theta1_deg;
    row.theta3_deg = s.aggregate.theta3_deg;
    sweep.delta_phi_rows.push_back(std::move(row));
  }
  for (double t1 : s.sweep.theta1_deg_grid)
    for (double t3 : s.sweep.theta3_deg_grid) {
      const AggregateSpec g = s.aggregate.build_with_thetas(t1, t3);
      AbRow row = evaluate_loop(g, s.drive.build(), path, loop_area_A2(g, path));
      row.theta1_deg = t1;
      row.theta3_deg = t3;
      sweep.theta_rows.push_back(std::move(row));
    }
  return sweep;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

Json ValidationReport::to_json() const {
  Json list = Json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"value", c.value},
                    {"threshold", c.threshold},
                    {"detail", c.detail}});
  return {{"passed", passed()},
          {"drive_ratio", {{"field", drive.field_ratio}, {"coupling", drive.coupling_ratio}}},
          {"checks", list}};
}

ValidationReport compute_validation(const Scenario& s) {
  const AggregateSpec agg = s.aggregate.build();
  const DriveSpec drive = s.drive.build();
  const LabDipoles frame = aggregate_frame_dipoles(agg);
  const double omega = drive.omega_cm1(agg);
  const int n_max = s.validation.floquet_n_max;
  ValidationReport report;
  const auto add = [&](std::string name, double value, double threshold, std::string detail = {}) {
    report.checks.push_back({std::move(name), value < threshold, value, threshold, std::move(detail)});
  };
  const auto fail = [&](std::string name, double threshold, const std::exception& e) {
    report.checks.push_back({std::move(name), false, std::nan(""), threshold, e.what()});
  };
  const std::string ratio_note = [&] {
    report.drive = rwa_validity(agg, drive, frame);
    return fmt::format("drive ratio |mu E|/Omega = {:.4g}, |J_EF|/Omega = {:.4g}", report.drive.field_ratio,
                       report.drive.coupling_ratio);
  }();

  add("rwa_drive_ratio", report.drive.field_ratio, kRwaRatioMax, ratio_note);

  try {
    add("full_vs_rwa_block", full_vs_rwa_deviation(agg, drive, frame, n_max) / omega, kFullVsRwaMaxOmega,
        "max |eps_full - eps_rwa| / Omega, aggregate frame; " + ratio_note);
  } catch (const NumericalError& e) {
    fail("full_vs_rwa_block", kFullVsRwaMaxOmega, e);
  }

  try {
    const int sweep[] = {n_max, 2 * n_max};
    const auto steps = truncation_sweep(agg, drive, frame, sweep);
    add("floquet_truncation", steps.back().max_change_cm1 / omega, kTruncationMaxOmega,
        fmt::format("central quasi-energy change from n_max {} to {}, over Omega", n_max, 2 * n_max));
  } catch (const NumericalError& e) {
    fail("floquet_truncation", kTruncationMaxOmega, e);
  }

  {
    DriveSpec off = drive;
    off.e0_V_per_m = 0.0;
    const PropagatorResult prop = propagate_period(agg, off, frame, s.validation.tdse_steps);
    const CMatrix ht = build_exciton_hamiltonian(agg).entries.block(1, 1, prop.u_period.rows(), prop.u_period.cols());
    const EigenSystem es = eigh(ht);
    Eigen::VectorXcd phases(es.values.size());
    for (Eigen::Index k = 0; k < es.values.size(); ++k) phases(k) = std::polar(1.0, -es.values(k) * prop.period);
    const CMatrix exact = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
    add("undriven_exact_exponential", (prop.u_period - exact).cwiseAbs().maxCoeff(), kExactExponentialMax,
        "max |U_tdse(T) - exp(-i H_T T)| with the drive off");
  }

  const CounterRng rng(s.validation.orientation_seed);
  for (std::size_t k = 0; k < s.validation.orientations; ++k) {
    const Orientation o = sample_orientation_at(rng, k);
    const LabDipoles lab = rotate_dipoles(agg, o);
    const std::string where = fmt::format("[{}]", k);
    const std::string angles = fmt::format("chi={:.4f} psi={:.4f} theta={:.4f}", o.chi, o.psi, o.theta);
    try {
      const PropagatorResult prop = propagate_period(agg, drive, lab, s.validation.tdse_steps);
      add("tdse_unitarity" + where, prop.unitarity_defect, kMaxUnitarityDefect, angles);
      try {
        const auto full = compare_quasi_energies(prop, quasi_energies(build_full_floquet(agg, drive, lab, n_max)), agg);
        add("tdse_vs_full_floquet" + where, full.max_distance, kTdseFullMaxRad, angles + "; radians on the unit circle");
      } catch (const NumericalError& e) {
        fail("tdse_vs_full_floquet" + where, kTdseFullMaxRad, e);
      }
      const auto rwa = compare_quasi_energies(prop, quasi_energies(build_rwa_block(agg, drive, lab, 1)), agg);
      add("tdse_vs_rwa" + where, rwa.max_distance, kTdseRwaMaxRad, angles + "; " + ratio_note);
    } catch (const StepSizeError& e) {
      fail("tdse_unitarity" + where, kMaxUnitarityDefect, e);
    }
  }
  return report;
}

namespace {

std::string fmt_deg(double rad) {
  const double deg = units::rad_to_deg(rad);
  return fmt::format("{:.2f}", std::abs(deg) < 5e-3 ? 0.0 : deg);
}

}  // namespace

int cmd_absorption(const Scenario& s, const fs::path& out_dir, std::ostream& log) {
  const AbsorptionResult r = compute_absorption(s);
  OutputWriter w(out_dir, "absorption", s);
  if (s.outputs.wants("csv")) w.write("absorption.csv", spectrum_table(r.spectrum, nullptr).render());
  if (s.outputs.wants("json")) {
    Json sticks = Json::array();
    for (const auto& st : r.sticks) sticks.push_back({{"omega_cm1", st.omega_cm1}, {"weight", st.weight}});
    const Json j = {{"meta", spectrum_meta_json(r.spectrum.meta)},
                    {"peaks", peaks_json(r.peaks)},
                    {"sticks", sticks},
                    {"bands", {{"E", band_json(r.bands.e_band)}, {"F", band_json(r.bands.f_band)}}}};
    w.write("absorption.json", j.dump(2) + "\n");
  }
  if (s.outputs.wants("svg"))
    w.write("absorption.svg", svg_line_plot({{"", r.spectrum.omega_cm1, r.spectrum.values}},
                                            "Undriven isotropic absorption", "omega (cm^-1)", "W / max W"));
  w.finish();
  log << fmt::format("{:>12} {:>10}\n", "omega_cm1", "height");
  for (const auto& p : r.peaks) log << fmt::format("{:>12.2f} {:>10.4f}\n", p.omega_cm1, p.height);
  log << fmt::format("E band center {:.2f} cm^-1, spread {:.2f}; F band center {:.2f}, spread {:.2f}\n",
                     r.bands.e_band.center_cm1, r.bands.e_band.spread_cm1, r.bands.f_band.center_cm1,
                     r.bands.f_band.spread_cm1);
  return kExitOk;
}

int cmd_cd_map(const Scenario& s, const fs::path& out_dir, std::ostream& log) {
  const CdMap map = compute_cd_map(s);
  OutputWriter w(out_dir, "cd-map", s);
  if (map.meta.seed) w.set_seed(*map.meta.seed);

  const auto table = [&](const std::vector<std::vector<double>>& data) {
    CsvTable t;
    t.header.emplace_back("tool_version", kToolVersion);
    t.header.emplace_back("method", map.meta.method);
    t.header.emplace_back("samples", std::to_string(map.meta.orientation_count));
    t.header.emplace_back("seed", map.meta.seed ? std::to_string(*map.meta.seed) : "none");
    t.header.emplace_back("seed_policy", "common");
    t.header.emplace_back("normalization", format_number(map.normalization));
    t.header.emplace_back("linewidth_cm1", format_number(map.meta.linewidth_cm1));
    t.header.emplace_back("lineshape", map.meta.lineshape);
    t.header.emplace_back("layout", "rows omega_cm1, columns delta_phi in degrees");
    t.columns.push_back("omega_cm1");
    for (double d : s.sweep.delta_phi_deg) t.columns.push_back("dphi_" + format_number(d));
    for (std::size_t k = 0; k < map.omega_cm1.size(); ++k) {
      std::vector<double> row = {map.omega_cm1[k]};
      for (const auto& r : data) row.push_back(r[k]);
      t.rows.push_back(std::move(row));
    }
    return t.render();
  };
  if (s.outputs.wants("csv")) {
    w.write("cd_map.csv", table(map.values));
    w.write("cd_map_stderr.csv", table(map.standard_error));
  }

  Json rows = Json::array();
  for (std::size_t r = 0; r < map.values.size(); ++r) {
    std::size_t arg = 0;
    for (std::size_t k = 0; k < map.values[r].size(); ++k)
      if (std::abs(map.values[r][k]) > std::abs(map.values[r][arg])) arg = k;
    rows.push_back({{"delta_phi_deg", s.sweep.delta_phi_deg[r]},
                    {"max_abs", std::abs(map.values[r][arg])},
                    {"at_omega_cm1", map.omega_cm1[arg]},
                    {"stderr_at_max", map.standard_error[r][arg]}});
    log << fmt::format("dphi {:>8.2f} deg  max|CD| {:.4e} at {:.2f} cm^-1\n", s.sweep.delta_phi_deg[r],
                       std::abs(map.values[r][arg]), map.omega_cm1[arg]);
  }
  if (s.outputs.wants("json"))
    w.write("cd_map.json",
            Json({{"meta", spectrum_meta_json(map.meta)}, {"seed_policy", "common"}, {"rows", rows}}).dump(2) + "\n");
  if (s.outputs.wants("svg"))
    w.write("cd_map.svg", svg_heatmap(map.omega_cm1, s.sweep.delta_phi_deg, map.values,
                                      "Orientation-averaged CD / max undriven absorption", "omega (cm^-1)",
                                      "delta phi (deg)"));
  w.finish();
  return kExitOk;
}

int cmd_ab_sweep(const Scenario& s, const fs::path& out_dir, std::ostream& log) {
  const AbSweep sweep = compute_ab_sweep(s);
  OutputWriter w(out_dir, "ab-sweep", s);

  const auto table = [&](const std::vector<AbRow>& rows, bool with_theta) {
    CsvTable t;
    t.header.emplace_back("tool_version", kToolVersion);
    t.header.emplace_back("loop_area_A2", format_number(sweep.loop_area_A2));
    t.columns = {"delta_phi_rad", "Phi_rad", "Phi_mod_2pi_rad", "abs_W", "phi2_rad", "phi4_rad", "B_equiv_T"};
    if (with_theta) t.columns.insert(t.columns.begin(), {"theta1_deg", "theta3_deg"});
    t.columns.push_back("status");
    const double nan = std::nan("");
    for (const auto& r : rows) {
      std::vector<double> v;
      if (with_theta) v = {r.theta1_deg, r.theta3_deg};
      v.push_back(r.delta_phi_rad);
      if (r.loop) {
        v.insert(v.end(), {r.loop->phase, r.loop->phase_mod_2pi, r.loop->magnitude});
        v.push_back(r.sites ? r.sites->phi2 : nan);
        v.push_back(r.sites ? r.sites->phi4 : nan);
        v.push_back(r.field_T);
      } else {
        v.insert(v.end(), {nan, nan, nan, nan, nan, nan});
      }
      t.rows.push_back(std::move(v));
      t.row_notes.push_back(r.status);
    }
    return t.render();
  };

  log << fmt::format("{:>9} {:>9} {:>11} {:>9} {:>9} {:>11}  {}\n", "dphi_deg", "Phi_deg", "|W|", "phi2_deg",
                     "phi4_deg", "B_T", "status");
  for (const auto& r : sweep.delta_phi_rows) {
    if (r.loop)
      log << fmt::format("{:>9} {:>9} {:>11.4e} {:>9} {:>9} {:>11.1f}  {}\n", fmt_deg(r.delta_phi_rad),
                         fmt_deg(r.loop->phase_mod_2pi), r.loop->magnitude, r.sites ? fmt_deg(r.sites->phi2) : "-",
                         r.sites ? fmt_deg(r.sites->phi4) : "-", r.field_T, r.status);
    else
      log << fmt::format("{:>9} {:>9} {:>11} {:>9} {:>9} {:>11}  {}\n", fmt_deg(r.delta_phi_rad), "-", "-", "-", "-",
                         "-", r.status);
  }
  std::size_t broken = 0;
  for (const auto& r : sweep.theta_rows) broken += r.loop ? 0 : 1;
  if (!sweep.theta_rows.empty())
    log << fmt::format("theta sweep: {} geometries, {} broken\n", sweep.theta_rows.size(), broken);

  if (s.outputs.wants("csv")) {
    w.write("ab_sweep.csv", table(sweep.delta_phi_rows, false));
    if (!sweep.theta_rows.empty()) w.write("ab_theta_sweep.csv", table(sweep.theta_rows, true));
  }
  if (s.outputs.wants("json")) {
    Json rows = Json::array();
    for (const auto& r : sweep.delta_phi_rows) {
      Json j = {{"delta_phi_rad", r.delta_phi_rad}, {"status", r.status}};
      if (r.loop) {
        j["Phi_rad"] = r.loop->phase;
        j["abs_W"] = r.loop->magnitude;
        j["B_equiv_T"] = r.field_T;
      }
      rows.push_back(j);
    }
    w.write("ab_sweep.json", Json({{"loop_area_A2", sweep.loop_area_A2}, {"rows", rows}}).dump(2) + "\n");
  }
  if (s.outputs.wants("svg")) {
    PlotSeries series{"Phi", {}, {}};
    for (const auto& r : sweep.delta_phi_rows)
      if (r.loop) {
        series.x.push_back(units::rad_to_deg(wrap_phase_positive(r.delta_phi_rad)));
        series.y.push_back(units::rad_to_deg(r.loop->phase_mod_2pi));
      }
    w.write("ab_sweep.svg", svg_line_plot({series}, "Excitonic AB phase", "delta phi (deg)", "Phi mod 360 (deg)"));
  }
  w.finish();
  return kExitOk;
}

Json block_json(const FloquetBlock& block) {
  Json labels = Json::array(), re = Json::array(), im = Json::array();
  for (const auto& l : block.matrix.labels) labels.push_back(l.str());
  for (Eigen::Index r = 0; r < block.matrix.entries.rows(); ++r) {
    Json rr = Json::array(), ii = Json::array();
    for (Eigen::Index c = 0; c < block.matrix.entries.cols(); ++c) {
      rr.push_back(block.matrix.entries(r, c).real());
      ii.push_back(block.matrix.entries(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  const char* kind = block.kind == BlockKind::RwaF ? "rwa_f" : block.kind == BlockKind::RwaG ? "rwa_g" : "full";
  return {{"kind", kind}, {"index", block.index}, {"omega_drive_cm1", block.omega_drive_cm1},
          {"labels", labels}, {"re", re}, {"im", im}};
}

int cmd_validate(const Scenario& s, const fs::path& out_dir, std::ostream& log,
                 const std::vector<std::string>& dump_blocks) {
  const ValidationReport report = compute_validation(s);
  OutputWriter w(out_dir, "validate", s);
  w.write("validate.json", report.to_json().dump(2) + "\n");
  const AggregateSpec agg = s.aggregate.build();
  for (const auto& kind : dump_blocks) {
    const LabDipoles frame = aggregate_frame_dipoles(agg);
    if (kind == "rwa")
      w.write("block_rwa.json", block_json(build_rwa_block(agg, s.drive.build(), frame, 1)).dump(1) + "\n");
    else if (kind == "full")
      w.write("block_full.json",
              block_json(build_full_floquet(agg, s.drive.build(), frame, s.validation.floquet_n_max)).dump(1) + "\n");
    else
      throw ValidationError("unknown block kind '" + kind + "' (expected rwa or full)");
  }
  w.finish();
  for (const auto& c : report.checks)
    log << fmt::format("{} {:<28} {:.3e} < {:.3e}  {}\n", c.passed ? "PASS" : "FAIL", c.name, c.value, c.threshold,
                       c.detail);
  log << (report.passed() ? "all checks passed\n" : "validation FAILED\n");
  return report.passed() ? kExitOk : kExitValidation;
}

Json defaults_report() {
  const Json notes = {
      {"aggregate.preset", "square homotetramer, side 3.5 A; site 2 dipole along x, site 4 along y"},
      {"aggregate.theta1_deg", "in-plane dipole angle of site 1"},
      {"aggregate.theta3_deg", "in-plane dipole angle of site 3"},
      {"aggregate.mu_00_D", "|<e,0'|mu|g,0>|, E-type transition dipole"},
      {"aggregate.mu_01_D", "|<e,1'|mu|g,0>|, F-type (vibronic) transition dipole"},
      {"aggregate.mu_vib_D", "|<e,1'|mu|e,0'>|, vibrational dipole driven by the IR field"},
      {"aggregate.omega_e_cm1", "E-state (0-0) transition energy"},
      {"aggregate.omega_vib_cm1", "excited-state vibrational quantum; omega_F = omega_e + omega_vib"},
      {"aggregate.huang_rhys", "Huang-Rhys factor D; E/F coupling ratio is 1/D"},
      {"aggregate.eta_cm1_A3", "point-dipole prefactor: V = eta (u1.u2 - 3 (u1.r)(u2.r)) / r^3 before vibronic overlaps"},
      {"aggregate.fc_overlap_sign", "global sign of vibronic overlaps (gauge only)"},
      {"drive.e0_V_per_m", "IR drive amplitude"},
      {"drive.detuning_cm1", "Omega = omega_vib + detuning (-0.1 omega_vib)"},
      {"drive.phi_x_deg", "phase of the x field component"},
      {"drive.phi_y_deg", "phase of the y field component; defaults give delta phi = -90 deg, Phi = 90 deg"},
      {"probe.linewidth_cm1", "HWHM of the broadening profile"},
      {"probe.omega_min_cm1", "probe grid covers both bands with margins"},
      {"averaging.samples", "Monte Carlo orientations"},
      {"averaging.seed", "64-bit seed of the counter-based generator (SplitMix64)"},
      {"sweep.delta_phi_deg", "ellipticity grid for cd-map and ab-sweep"},
      {"validation.floquet_n_max", "photon-number truncation of the full Floquet matrix"},
      {"validation.tdse_steps", "RK4 steps per drive period"},
  };
  const Scenario s = default_scenario();
  const AggregateSpec agg = s.aggregate.build();
  const double omega = s.drive.build().omega_cm1(agg);
  const Json derived = {{"omega_drive_cm1", omega},
                        {"drive_period_cm1_inv", kTwoPi / omega},
                        {"drive_period_fs", kTwoPi / omega * units::kTimeUnitFemtoseconds},
                        {"rwa_drive_ratio", rwa_validity(agg, s.drive.build(), aggregate_frame_dipoles(agg)).field_ratio},
                        {"debye_V_per_m_to_cm1", units::kDebyeVmToCm1}};
  return {{"tool_version", kToolVersion}, {"scenario", to_json(s)}, {"notes", notes},
          {"derived", derived}};
}

}  // namespace floquet_ab::app
