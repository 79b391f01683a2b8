#pragma once

#include "floquet_ab/ab_phase.hpp"
#include "floquet_ab/core_model.hpp"
#include "floquet_ab/errors.hpp"
#include "floquet_ab/floquet.hpp"
#include "floquet_ab/orientation.hpp"
#include "floquet_ab/spectroscopy.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace floquet_ab::app {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Scenario sections mirror the JSON document one to one. Angles are kept in
// degrees here so that a document survives a load/save cycle unchanged.

struct AggregateSettings {
  std::string preset = "square_tetramer";  // or "custom"
  double theta1_deg = 45.0;                // preset only
  double theta3_deg = 315.0;
  double mu_00_D = 0.90;                   // preset only; custom sites carry their own
  double mu_01_D = 0.74;
  double mu_vib_D = 0.15;
  std::vector<ChromophoreSpec> chromophores;  // custom only
  std::vector<std::pair<std::size_t, std::size_t>> neighbor_pairs;  // custom only; empty = ring
  double omega_e_cm1 = 27695.0;
  double omega_vib_cm1 = 385.0;
  double huang_rhys = 0.31;
  double eta_cm1_A3 = 982.0;
  double fc_overlap_sign = 1.0;

  bool is_preset() const { return preset == "square_tetramer"; }
  AggregateSpec build() const;
  // Preset geometry with replaced diagonal-site angles.
  AggregateSpec build_with_thetas(double theta1_deg, double theta3_deg) const;
};

struct DriveSettings {
  double e0_V_per_m = 2.7e8;
  double detuning_cm1 = -38.5;
  double phi_x_deg = 0.0;
  double phi_y_deg = 90.0;

  DriveSpec build() const;
  // Same field with phi_x = phi_y + delta_phi.
  DriveSpec build_with_delta_phi(double delta_phi_rad) const;
};

struct ProbeSettings {
  double e0_probe_V_per_m = 1.0;
  double omega_min_cm1 = 27540.0;
  double omega_max_cm1 = 28180.0;
  double omega_step_cm1 = 0.25;
  double linewidth_cm1 = 2.0;
  std::string lineshape = "lorentzian";

  ProbeSpec build() const;
};

struct AveragingSettings {
  std::string method = "monte_carlo";  // or "quadrature"
  std::size_t samples = 20000;
  std::uint64_t seed = 42;
  std::size_t n_theta = 8;
  std::size_t n_chi = 8;
  std::size_t n_psi = 8;
  double chi_offset_deg = 0.0;
  std::optional<double> target_standard_error;

  AveragingPlan build() const;
};

struct SweepSettings {
  std::vector<double> delta_phi_deg;      // default: 16 points over [0, 360)
  std::vector<double> theta1_deg_grid;    // optional AB surface
  std::vector<double> theta3_deg_grid;
  std::vector<std::string> loop_path;     // labels such as "E1@2"; empty = reference loop

  LoopPath build_loop() const;
};

struct ValidationSettings {
  int floquet_n_max = 6;
  int tdse_steps = 20000;
  std::size_t orientations = 5;
  std::uint64_t orientation_seed = 2024;
};

struct OutputSettings {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json", "svg"};

  bool wants(const std::string& format) const;
};

struct Scenario {
  AggregateSettings aggregate;
  DriveSettings drive;
  ProbeSettings probe;
  AveragingSettings averaging;
  SweepSettings sweep;
  ValidationSettings validation;
  OutputSettings outputs;

  // Throws SchemaError when a section does not describe a valid model.
  void validate() const;
};

Scenario default_scenario();
std::vector<double> default_delta_phi_grid_deg();

Json to_json(const Scenario& s);
// Strict: unknown keys, wrong types and invalid values raise SchemaError.
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

// "E1@2" -> label_e(0, 2); "G", "F3" without photon index.
BasisLabel parse_basis_label(const std::string& text);

}  // namespace floquet_ab::app
