#pragma once

#include "floquet_ab/app/scenario.hpp"
#include "floquet_ab/spectroscopy.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace floquet_ab::app {

namespace fs = std::filesystem;

class IoError : public Error {
 public:
  using Error::Error;
};

// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

std::string sha256_hex(const std::string& bytes);

// Shortest text that parses back to the same double.
std::string format_number(double value);

// "# key: value" comment lines, then the data block.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_notes;  // optional trailing text column, e.g. status

  std::string render() const;
};

CsvTable spectrum_table(const SpectrumGrid& spectrum, const std::vector<double>* standard_error);
Json spectrum_meta_json(const SpectrumMeta& meta);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);
// z[row][col] over y[row] x x[col], diverging colour scale symmetric about zero.
std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<std::vector<double>>& z, const std::string& title,
                        const std::string& x_label, const std::string& y_label);

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string scenario_sha256;
  std::optional<std::uint64_t> seed;
  std::string started_utc;
  std::string finished_utc;
  std::vector<ManifestEntry> outputs;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

std::string utc_timestamp();

// Collects files written during one command and emits manifest.json last.
class OutputWriter {
 public:
  OutputWriter(fs::path directory, std::string command, const Scenario& scenario);

  const fs::path& directory() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  void set_seed(std::uint64_t seed) { manifest_.seed = seed; }
  const std::vector<fs::path>& files() const { return files_; }
  RunManifest finish();

 private:
  fs::path dir_;
  RunManifest manifest_;
  std::vector<fs::path> files_;
};

inline constexpr const char* kManifestName = "manifest.json";

// Empty when every listed file exists with the recorded checksum.
std::vector<std::string> verify_manifest(const fs::path& directory);

}  // namespace floquet_ab::app
