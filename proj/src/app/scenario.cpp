#include "floquet_ab/app/scenario.hpp"

#include "floquet_ab/units.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace floquet_ab::app {

namespace {

// Reads typed fields from one JSON object and remembers which keys were used,
// so leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!j_.at(key).is_number()) throw SchemaError(where(key) + ": expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!j_.at(key).is_number_integer()) throw SchemaError(where(key) + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (j_.at(key).is_number_integer() && !j_.at(key).is_number_unsigned())
            throw SchemaError(where(key) + ": expected a non-negative integer");
        }
      }
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where(key) + ": " + e.what());
    }
  }

  const Json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw SchemaError(where(key) + ": unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Vec3 read_vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(where + ": expected an array of 3 numbers");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number()) throw SchemaError(where + ": expected numbers");
    v(k) = j[static_cast<std::size_t>(k)].get<double>();
  }
  return v;
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

double rad(double deg) { return units::deg_to_rad(deg); }

}  // namespace

AggregateSpec AggregateSettings::build() const { return build_with_thetas(theta1_deg, theta3_deg); }

AggregateSpec AggregateSettings::build_with_thetas(double t1_deg, double t3_deg) const {
  AggregateSpec spec;
  if (is_preset()) {
    spec = default_square_tetramer(rad(t1_deg), rad(t3_deg));
    for (auto& c : spec.chromophores) {
      c.mu_00_D = mu_00_D;
      c.mu_01_D = mu_01_D;
      c.mu_vib_D = mu_vib_D;
    }
  } else {
    spec.chromophores = chromophores;
    for (auto& c : spec.chromophores) {
      const double n = c.dipole_dir.norm();
      if (n > 0) c.dipole_dir /= n;
    }
    spec.neighbor_pairs = neighbor_pairs;
    if (spec.neighbor_pairs.empty())
      for (std::size_t i = 0; i < chromophores.size(); ++i)
        spec.neighbor_pairs.emplace_back(i, (i + 1) % chromophores.size());
  }
  spec.omega_e_cm1 = omega_e_cm1;
  spec.omega_vib_cm1 = omega_vib_cm1;
  spec.huang_rhys = huang_rhys;
  spec.eta_cm1_A3 = eta_cm1_A3;
  spec.fc_overlap_sign = fc_overlap_sign;
  return spec;
}

DriveSpec DriveSettings::build() const {
  return DriveSpec::make(e0_V_per_m, detuning_cm1, rad(phi_x_deg), rad(phi_y_deg));
}

DriveSpec DriveSettings::build_with_delta_phi(double delta_phi_rad) const {
  return DriveSpec::make(e0_V_per_m, detuning_cm1, rad(phi_y_deg) + delta_phi_rad, rad(phi_y_deg));
}

ProbeSpec ProbeSettings::build() const {
  ProbeSpec p;
  p.e0_probe_V_per_m = e0_probe_V_per_m;
  p.omega_grid_cm1 = ProbeSpec::uniform_grid(omega_min_cm1, omega_max_cm1, omega_step_cm1);
  p.linewidth_cm1 = linewidth_cm1;
  p.lineshape = lineshape_from_string(lineshape);
  return p;
}

AveragingPlan AveragingSettings::build() const {
  AveragingPlan plan;
  if (method == "monte_carlo") {
    plan = AveragingPlan::monte_carlo(samples, seed);
  } else if (method == "quadrature") {
    plan = AveragingPlan::quadrature(n_theta, n_chi, n_psi);
    std::get<QuadraturePlan>(plan.method).chi_offset = rad(chi_offset_deg);
  } else {
    throw SchemaError("averaging.method: expected 'monte_carlo' or 'quadrature', got '" + method + "'");
  }
  plan.target_standard_error = target_standard_error;
  return plan;
}

LoopPath SweepSettings::build_loop() const {
  if (loop_path.empty()) return reference_loop(1);
  LoopPath p;
  for (const auto& s : loop_path) p.states.push_back(parse_basis_label(s));
  return p;
}

bool OutputSettings::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::vector<double> default_delta_phi_grid_deg() {
  std::vector<double> g;
  for (int k = 0; k < 16; ++k) g.push_back(22.5 * k);
  return g;
}

Scenario default_scenario() {
  Scenario s;
  s.sweep.delta_phi_deg = default_delta_phi_grid_deg();
  return s;
}

void Scenario::validate() const {
  try {
    const AggregateSpec agg = aggregate.build();
    agg.validate();
    drive.build().validate(agg);
    const ProbeSpec p = probe.build();
    p.validate();
    if (!(probe.e0_probe_V_per_m > 0)) throw ValidationError("probe.e0_probe_V_per_m must be positive");
    averaging.build().validate();
    if (sweep.delta_phi_deg.empty()) throw ValidationError("sweep.delta_phi_deg must not be empty");
    if (!aggregate.is_preset() && (!sweep.theta1_deg_grid.empty() || !sweep.theta3_deg_grid.empty()))
      throw ValidationError("theta sweeps need the square_tetramer preset");
    if (sweep.theta1_deg_grid.empty() != sweep.theta3_deg_grid.empty())
      throw ValidationError("theta1_deg_grid and theta3_deg_grid must be given together");
    sweep.build_loop().validate();
    if (validation.floquet_n_max < 1) throw ValidationError("validation.floquet_n_max must be at least 1");
    if (validation.tdse_steps < 1000) throw ValidationError("validation.tdse_steps must be at least 1000");
    if (validation.orientations < 1) throw ValidationError("validation.orientations must be positive");
    for (const auto& f : outputs.formats)
      if (f != "csv" && f != "json" && f != "svg") throw ValidationError("outputs.formats: unknown format '" + f + "'");
  } catch (const SchemaError&) {
    throw;
  } catch (const ValidationError& e) {
    throw SchemaError(std::string("invalid scenario: ") + e.what());
  }
}

Json to_json(const Scenario& s) {
  Json j;
  const auto& a = s.aggregate;
  Json agg;
  agg["preset"] = a.preset;
  if (a.is_preset()) {
    agg["theta1_deg"] = a.theta1_deg;
    agg["theta3_deg"] = a.theta3_deg;
    agg["mu_00_D"] = a.mu_00_D;
    agg["mu_01_D"] = a.mu_01_D;
    agg["mu_vib_D"] = a.mu_vib_D;
  } else {
    Json sites = Json::array();
    for (const auto& c : a.chromophores)
      sites.push_back({{"position_A", vec3_json(c.position_A)},
                       {"dipole_dir", vec3_json(c.dipole_dir)},
                       {"mu_00_D", c.mu_00_D},
                       {"mu_01_D", c.mu_01_D},
                       {"mu_vib_D", c.mu_vib_D}});
    agg["chromophores"] = sites;
    Json pairs = Json::array();
    for (auto [i, k] : a.neighbor_pairs) pairs.push_back(Json::array({i, k}));
    agg["neighbor_pairs"] = pairs;
  }
  agg["omega_e_cm1"] = a.omega_e_cm1;
  agg["omega_vib_cm1"] = a.omega_vib_cm1;
  agg["huang_rhys"] = a.huang_rhys;
  agg["eta_cm1_A3"] = a.eta_cm1_A3;
  agg["fc_overlap_sign"] = a.fc_overlap_sign;
  j["aggregate"] = agg;

  j["drive"] = {{"e0_V_per_m", s.drive.e0_V_per_m},
                {"detuning_cm1", s.drive.detuning_cm1},
                {"phi_x_deg", s.drive.phi_x_deg},
                {"phi_y_deg", s.drive.phi_y_deg}};
  j["probe"] = {{"e0_probe_V_per_m", s.probe.e0_probe_V_per_m},
                {"omega_min_cm1", s.probe.omega_min_cm1},
                {"omega_max_cm1", s.probe.omega_max_cm1},
                {"omega_step_cm1", s.probe.omega_step_cm1},
                {"linewidth_cm1", s.probe.linewidth_cm1},
                {"lineshape", s.probe.lineshape}};
  const auto& av = s.averaging;
  Json avg = {{"method", av.method}};
  if (av.method == "monte_carlo") {
    avg["samples"] = av.samples;
    avg["seed"] = av.seed;
  } else {
    avg["n_theta"] = av.n_theta;
    avg["n_chi"] = av.n_chi;
    avg["n_psi"] = av.n_psi;
    avg["chi_offset_deg"] = av.chi_offset_deg;
  }
  if (av.target_standard_error) avg["target_standard_error"] = *av.target_standard_error;
  j["averaging"] = avg;

  Json sweep = {{"delta_phi_deg", s.sweep.delta_phi_deg}};
  if (!s.sweep.theta1_deg_grid.empty()) {
    sweep["theta1_deg_grid"] = s.sweep.theta1_deg_grid;
    sweep["theta3_deg_grid"] = s.sweep.theta3_deg_grid;
  }
  if (!s.sweep.loop_path.empty()) sweep["loop_path"] = s.sweep.loop_path;
  j["sweep"] = sweep;

  j["validation"] = {{"floquet_n_max", s.validation.floquet_n_max},
                     {"tdse_steps", s.validation.tdse_steps},
                     {"orientations", s.validation.orientations},
                     {"orientation_seed", s.validation.orientation_seed}};
  j["outputs"] = {{"directory", s.outputs.directory}, {"formats", s.outputs.formats}};
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s = default_scenario();
  Section root(j, "scenario");

  if (root.has("aggregate")) {
    Section sec(root.child("aggregate"), "aggregate");
    auto& a = s.aggregate;
    sec.read("preset", a.preset);
    if (a.preset != "square_tetramer" && a.preset != "custom")
      throw SchemaError("aggregate.preset: expected 'square_tetramer' or 'custom'");
    if (a.is_preset()) {
      sec.read("theta1_deg", a.theta1_deg);
      sec.read("theta3_deg", a.theta3_deg);
      sec.read("mu_00_D", a.mu_00_D);
      sec.read("mu_01_D", a.mu_01_D);
      sec.read("mu_vib_D", a.mu_vib_D);
    } else {
      if (!sec.has("chromophores")) throw SchemaError("aggregate.chromophores: required for a custom aggregate");
      const Json& sites = sec.child("chromophores");
      if (!sites.is_array()) throw SchemaError("aggregate.chromophores: expected an array");
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const std::string where = "aggregate.chromophores[" + std::to_string(i) + "]";
        Section site(sites[i], where);
        ChromophoreSpec c;
        if (!site.has("position_A") || !site.has("dipole_dir"))
          throw SchemaError(where + ": position_A and dipole_dir are required");
        c.position_A = read_vec3(site.child("position_A"), where + ".position_A");
        c.dipole_dir = read_vec3(site.child("dipole_dir"), where + ".dipole_dir");
        if (!(c.dipole_dir.norm() > 0)) throw SchemaError(where + ".dipole_dir: zero vector");
        site.read("mu_00_D", c.mu_00_D);
        site.read("mu_01_D", c.mu_01_D);
        site.read("mu_vib_D", c.mu_vib_D);
        site.finish();
        a.chromophores.push_back(c);
      }
      if (sec.has("neighbor_pairs")) {
        const Json& pairs = sec.child("neighbor_pairs");
        if (!pairs.is_array()) throw SchemaError("aggregate.neighbor_pairs: expected an array");
        for (const auto& p : pairs) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
            throw SchemaError("aggregate.neighbor_pairs: expected pairs of site indices");
          a.neighbor_pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
        }
      }
    }
    sec.read("omega_e_cm1", a.omega_e_cm1);
    sec.read("omega_vib_cm1", a.omega_vib_cm1);
    sec.read("huang_rhys", a.huang_rhys);
    sec.read("eta_cm1_A3", a.eta_cm1_A3);
    sec.read("fc_overlap_sign", a.fc_overlap_sign);
    sec.finish();
  }

  if (root.has("drive")) {
    Section sec(root.child("drive"), "drive");
    sec.read("e0_V_per_m", s.drive.e0_V_per_m);
    sec.read("detuning_cm1", s.drive.detuning_cm1);
    sec.read("phi_x_deg", s.drive.phi_x_deg);
    sec.read("phi_y_deg", s.drive.phi_y_deg);
    sec.finish();
  }

  if (root.has("probe")) {
    Section sec(root.child("probe"), "probe");
    auto& p = s.probe;
    sec.read("e0_probe_V_per_m", p.e0_probe_V_per_m);
    sec.read("omega_min_cm1", p.omega_min_cm1);
    sec.read("omega_max_cm1", p.omega_max_cm1);
    sec.read("omega_step_cm1", p.omega_step_cm1);
    sec.read("linewidth_cm1", p.linewidth_cm1);
    sec.read("lineshape", p.lineshape);
    sec.finish();
  }

  if (root.has("averaging")) {
    Section sec(root.child("averaging"), "averaging");
    auto& av = s.averaging;
    sec.read("method", av.method);
    sec.read("samples", av.samples);
    sec.read("seed", av.seed);
    sec.read("n_theta", av.n_theta);
    sec.read("n_chi", av.n_chi);
    sec.read("n_psi", av.n_psi);
    sec.read("chi_offset_deg", av.chi_offset_deg);
    if (sec.has("target_standard_error")) {
      double t = 0.0;
      sec.read("target_standard_error", t);
      av.target_standard_error = t;
    }
    sec.finish();
  }

  if (root.has("sweep")) {
    Section sec(root.child("sweep"), "sweep");
    sec.read("delta_phi_deg", s.sweep.delta_phi_deg);
    sec.read("theta1_deg_grid", s.sweep.theta1_deg_grid);
    sec.read("theta3_deg_grid", s.sweep.theta3_deg_grid);
    sec.read("loop_path", s.sweep.loop_path);
    sec.finish();
  }

  if (root.has("validation")) {
    Section sec(root.child("validation"), "validation");
    sec.read("floquet_n_max", s.validation.floquet_n_max);
    sec.read("tdse_steps", s.validation.tdse_steps);
    sec.read("orientations", s.validation.orientations);
    sec.read("orientation_seed", s.validation.orientation_seed);
    sec.finish();
  }

  if (root.has("outputs")) {
    Section sec(root.child("outputs"), "outputs");
    sec.read("directory", s.outputs.directory);
    sec.read("formats", s.outputs.formats);
    sec.finish();
  }
  root.finish();

  try {
    for (const auto& label : s.sweep.loop_path) parse_basis_label(label);
  } catch (const ValidationError& e) {
    throw SchemaError(std::string("sweep.loop_path: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read scenario file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

BasisLabel parse_basis_label(const std::string& text) {
  const auto bad = [&] { return ValidationError("malformed state label '" + text + "'"); };
  if (text.empty()) throw bad();
  BasisLabel label;
  const std::size_t at = text.find('@');
  const std::string head = text.substr(0, at);
  if (at != std::string::npos) {
    const std::string tail = text.substr(at + 1);
    std::size_t used = 0;
    int photon = 0;
    try {
      photon = std::stoi(tail, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != tail.size()) throw bad();
    label.photon = photon;
  }
  const char kind = head[0];
  if (kind == 'G') {
    if (head.size() != 1) throw bad();
    label.exciton = {ExcitonKind::G, 0};
    return label;
  }
  if ((kind != 'E' && kind != 'F') || head.size() < 2) throw bad();
  std::size_t used = 0;
  long site = 0;
  try {
    site = std::stol(head.substr(1), &used);
  } catch (const std::exception&) {
    throw bad();
  }
  if (used != head.size() - 1 || site < 1) throw bad();
  label.exciton = {kind == 'E' ? ExcitonKind::E : ExcitonKind::F, static_cast<std::size_t>(site - 1)};
  return label;
}

}  // namespace floquet_ab::app
