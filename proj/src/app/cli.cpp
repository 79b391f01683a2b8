#include "floquet_ab/app/commands.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace floquet_ab::app {

namespace {

struct CommonFlags {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> linewidth;
  std::vector<std::string> formats;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--scenario", f.scenario, "scenario JSON file (defaults when omitted)");
  sub->add_option("--out", f.out, "output directory (overrides outputs.directory)");
  sub->add_option("--seed", f.seed, "Monte Carlo seed");
  sub->add_option("--samples", f.samples, "Monte Carlo sample count (selects Monte Carlo averaging)");
  sub->add_option("--linewidth", f.linewidth, "lineshape HWHM in cm^-1");
  sub->add_option("--format", f.formats, "output formats to write: csv, json, svg (repeatable)")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
}

Scenario resolve(const CommonFlags& f) {
  Scenario s = f.scenario.empty() ? default_scenario() : load_scenario(f.scenario);
  if (!f.out.empty()) s.outputs.directory = f.out;
  if (f.seed) s.averaging.seed = *f.seed;
  if (f.samples) {
    s.averaging.method = "monte_carlo";
    s.averaging.samples = *f.samples;
  }
  if (f.linewidth) s.probe.linewidth_cm1 = *f.linewidth;
  if (!f.formats.empty()) s.outputs.formats = f.formats;
  s.validate();
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet-engineered excitonic Aharonov-Bohm simulator", "floquet-ab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonFlags flags;
  std::vector<std::string> dump_blocks;
  CLI::App* absorption = app.add_subcommand("absorption", "undriven isotropic absorption spectrum and peak table");
  CLI::App* cd_map = app.add_subcommand("cd-map", "orientation-averaged CD over the delta-phi grid");
  CLI::App* ab_sweep = app.add_subcommand("ab-sweep", "Wilson-loop AB phase over delta phi and optional theta grid");
  CLI::App* validate = app.add_subcommand("validate", "TDSE and full-Floquet cross-checks; exit 2 on failure");
  CLI::App* defaults = app.add_subcommand("print-defaults", "print the default scenario with parameter notes");
  for (CLI::App* sub : {absorption, cd_map, ab_sweep, validate}) add_common(sub, flags);
  validate->add_option("--dump-block", dump_blocks, "also write the rwa and/or full Floquet block as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (defaults->parsed()) {
      out << defaults_report().dump(2) << "\n";
      return kExitOk;
    }
    const Scenario s = resolve(flags);
    const fs::path dir = s.outputs.directory;
    int code = kExitOk;
    if (absorption->parsed()) code = cmd_absorption(s, dir, out);
    else if (cd_map->parsed()) code = cmd_cd_map(s, dir, out);
    else if (ab_sweep->parsed()) code = cmd_ab_sweep(s, dir, out);
    else if (validate->parsed()) code = cmd_validate(s, dir, out, dump_blocks);
    if (code == kExitOk) out << "wrote " << dir.string() << "\n";
    return code;
  } catch (const SchemaError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace floquet_ab::app
