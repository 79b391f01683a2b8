#pragma once

#include "floquet_ab/ab_phase.hpp"
#include "floquet_ab/app/outputs.hpp"
#include "floquet_ab/app/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace floquet_ab::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // usage and IO problems
  kExitValidation = 2,
  kExitSchema = 3,
  kExitNumerical = 4,
};

struct AbsorptionResult {
  SpectrumGrid spectrum;  // normalized to its maximum
  std::vector<Stick> sticks;
  std::vector<Peak> peaks;
  BandStructure bands;
};

AbsorptionResult compute_absorption(const Scenario& s);

// Rows follow the scenario's delta_phi grid; every row uses the same
// orientation sample (common seed), normalized to the undriven absorption max.
struct CdMap {
  std::vector<double> delta_phi_rad;
  std::vector<double> omega_cm1;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> standard_error;
  double normalization = 1.0;
  SpectrumMeta meta;
};

CdMap compute_cd_map(const Scenario& s, std::size_t workers = 0);

struct AbRow {
  double delta_phi_rad = 0.0;
  double theta1_deg = 0.0;
  double theta3_deg = 0.0;
  std::optional<WilsonLoopResult> loop;
  std::optional<SitePhases> sites;
  double field_T = 0.0;
  std::string status = "ok";
};

struct AbSweep {
  double loop_area_A2 = 0.0;
  std::vector<AbRow> delta_phi_rows;
  std::vector<AbRow> theta_rows;  // at the scenario drive
};

// Area enclosed by the sites a loop visits, from the aggregate geometry.
double loop_area_A2(const AggregateSpec& agg, const LoopPath& path);
AbSweep compute_ab_sweep(const Scenario& s);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  RwaValidity drive;
  bool passed() const;
  Json to_json() const;
};

ValidationReport compute_validation(const Scenario& s);

// Each command writes into `out_dir` (created if needed), finishes with a
// manifest, prints a short summary and returns an ExitCode.
int cmd_absorption(const Scenario& s, const fs::path& out_dir, std::ostream& log);
int cmd_cd_map(const Scenario& s, const fs::path& out_dir, std::ostream& log);
int cmd_ab_sweep(const Scenario& s, const fs::path& out_dir, std::ostream& log);
int cmd_validate(const Scenario& s, const fs::path& out_dir, std::ostream& log,
                 const std::vector<std::string>& dump_blocks = {});

// Default scenario plus a short description of every parameter.
Json defaults_report();

// Matrix, labels and Re/Im parts of a Floquet block, for debugging.
Json block_json(const FloquetBlock& block);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace floquet_ab::app
