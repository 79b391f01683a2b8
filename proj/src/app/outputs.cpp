#include "floquet_ab/app/outputs.hpp"

#include <fmt/core.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace floquet_ab::app {

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + temp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to " + temp.string() + " failed");
  }
  fs::rename(temp, path, ec);
  if (ec) throw IoError("cannot move " + temp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int k = 0; k < length; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string CsvTable::render() const {
  std::string out;
  for (const auto& [key, value] : header) out += "# " + key + ": " + value + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) out += (c ? "," : "") + format_number(rows[r][c]);
    if (r < row_notes.size()) out += "," + row_notes[r];
    out += "\n";
  }
  return out;
}

Json spectrum_meta_json(const SpectrumMeta& meta) {
  Json j = {{"method", meta.method},
            {"normalization", meta.normalization},
            {"orientation_count", meta.orientation_count},
            {"linewidth_cm1", meta.linewidth_cm1},
            {"lineshape", meta.lineshape}};
  j["seed"] = meta.seed ? Json(*meta.seed) : Json(nullptr);
  j["delta_phi_rad"] = meta.delta_phi ? Json(*meta.delta_phi) : Json(nullptr);
  return j;
}

CsvTable spectrum_table(const SpectrumGrid& spectrum, const std::vector<double>* standard_error) {
  CsvTable t;
  const auto& m = spectrum.meta;
  t.header.emplace_back("tool_version", kToolVersion);
  t.header.emplace_back("method", m.method);
  t.header.emplace_back("samples", std::to_string(m.orientation_count));
  t.header.emplace_back("seed", m.seed ? std::to_string(*m.seed) : "none");
  if (m.delta_phi) t.header.emplace_back("delta_phi_rad", format_number(*m.delta_phi));
  t.header.emplace_back("normalization", format_number(m.normalization));
  t.header.emplace_back("linewidth_cm1", format_number(m.linewidth_cm1));
  t.header.emplace_back("lineshape", m.lineshape);
  t.columns = {"omega_cm1", "value"};
  if (standard_error) t.columns.push_back("stderr");
  for (std::size_t k = 0; k < spectrum.omega_cm1.size(); ++k) {
    std::vector<double> row = {spectrum.omega_cm1[k], spectrum.values[k]};
    if (standard_error) row.push_back((*standard_error)[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

struct Frame {
  double width = 820, height = 480;
  double left = 90, right = 30, top = 40, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::string axes(const Frame& f, const std::string& title, const std::string& xl, const std::string& yl) {
  std::string s;
  s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"#333\"/>\n",
                   f.left, f.top, f.width - f.left - f.right, f.height - f.top - f.bottom);
  for (double t : ticks(f.x0, f.x1)) {
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#333\"/>\n", f.px(t),
                     f.height - f.bottom, f.height - f.bottom + 5);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\">{:g}</text>\n", f.px(t),
                     f.height - f.bottom + 20, t);
  }
  for (double t : ticks(f.y0, f.y1)) {
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#333\"/>\n", f.left - 5,
                     f.py(t), f.left);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"end\">{:.3g}</text>\n", f.left - 8,
                     f.py(t) + 4, t);
  }
  s += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n", f.width / 2,
                   escape(title));
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                   (f.left + f.width - f.right) / 2, f.height - 15, escape(xl));
  s += fmt::format(
      "<text x=\"20\" y=\"{0:.1f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.1f})\">{1}</text>\n",
      (f.top + f.height - f.bottom) / 2, escape(yl));
  return s;
}

std::string svg_open(const Frame& f) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" "
      "height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\">\n<rect width=\"100%\" "
      "height=\"100%\" fill=\"white\"/>\n",
      f.width, f.height);
}

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  Frame f;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (first) {
        f.x0 = f.x1 = s.x[k];
        f.y0 = f.y1 = s.y[k];
        first = false;
      }
      f.x0 = std::min(f.x0, s.x[k]);
      f.x1 = std::max(f.x1, s.x[k]);
      f.y0 = std::min(f.y0, s.y[k]);
      f.y1 = std::max(f.y1, s.y[k]);
    }
  if (!(f.x1 > f.x0)) f.x1 = f.x0 + 1;
  if (!(f.y1 > f.y0)) {
    f.y0 -= 1;
    f.y1 += 1;
  }
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string s = svg_open(f) + axes(f, title, x_label, y_label);
  if (f.y0 < 0 && f.y1 > 0)
    s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n",
                     f.left, f.py(0), f.width - f.right, f.py(0));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = palette[k % 6];
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.3\" points=\"", colour);
    for (std::size_t i = 0; i < series[k].x.size(); ++i)
      s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", f.px(series[k].x[i]), f.py(series[k].y[i]));
    s += "\"/>\n";
    if (!series[k].name.empty())
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" fill=\"{}\">{}</text>\n", f.width - f.right - 150,
                       f.top + 18 + 16.0 * static_cast<double>(k), colour, escape(series[k].name));
  }
  return s + "</svg>\n";
}

std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<std::vector<double>>& z, const std::string& title, const std::string& x_label,
                        const std::string& y_label) {
  Frame f;
  f.right = 90;
  if (x.empty() || y.empty()) return svg_open(f) + "</svg>\n";
  f.x0 = x.front();
  f.x1 = x.size() > 1 ? x.back() : x.front() + 1;
  const double dy = y.size() > 1 ? (y.back() - y.front()) / static_cast<double>(y.size() - 1) : 1.0;
  f.y0 = y.front() - 0.5 * dy;
  f.y1 = y.back() + 0.5 * dy;

  double zmax = 0.0;
  for (const auto& row : z)
    for (double v : row) zmax = std::max(zmax, std::abs(v));
  if (!(zmax > 0)) zmax = 1.0;
  const auto colour = [&](double v) {
    const double t = std::clamp(v / zmax, -1.0, 1.0);
    const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
    return t >= 0 ? fmt::format("rgb(255,{0},{0})", fade) : fmt::format("rgb({0},{0},255)", fade);
  };

  // At most ~600 columns: neighbouring columns are averaged into bins.
  const std::size_t bins = std::min<std::size_t>(x.size(), 600);
  std::string s = svg_open(f);
  for (std::size_t r = 0; r < z.size() && r < y.size(); ++r) {
    const double top = f.py(y[r] + 0.5 * dy);
    const double bottom = f.py(y[r] - 0.5 * dy);
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t lo = b * x.size() / bins, hi = (b + 1) * x.size() / bins;
      double acc = 0.0;
      for (std::size_t c = lo; c < hi; ++c) acc += z[r][c];
      const double v = acc / static_cast<double>(hi - lo);
      const double xl = f.px(x[lo]);
      const double xr = hi < x.size() ? f.px(x[hi]) : f.px(f.x1);
      s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", xl, top,
                       std::max(xr - xl, 0.5), bottom - top, colour(v));
    }
  }
  s += axes(f, title, x_label, y_label);
  // Colour bar.
  const double bx = f.width - f.right + 25, bh = f.height - f.top - f.bottom;
  for (int k = 0; k < 50; ++k) {
    const double v = zmax * (1.0 - 2.0 * (k + 0.5) / 50.0);
    s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n", bx,
                     f.top + bh * k / 50.0, bh / 50.0 + 0.3, colour(v));
  }
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{:.2g}</text>\n", bx + 20, f.top + 10, zmax);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{:.2g}</text>\n", bx + 20, f.top + bh, -zmax);
  return s + "</svg>\n";
}

Json RunManifest::to_json() const {
  Json files = Json::array();
  for (const auto& e : outputs) files.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  return {{"tool_version", tool_version},
          {"command", command},
          {"scenario_sha256", scenario_sha256},
          {"seed", seed ? Json(*seed) : Json(nullptr)},
          {"started_utc", started_utc},
          {"finished_utc", finished_utc},
          {"outputs", files}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.started_utc = j.at("started_utc").get<std::string>();
    m.finished_utc = j.at("finished_utc").get<std::string>();
    for (const auto& e : j.at("outputs"))
      m.outputs.push_back({e.at("file").get<std::string>(), e.at("sha256").get<std::string>(),
                           e.at("bytes").get<std::uintmax_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputWriter::OutputWriter(fs::path directory, std::string command, const Scenario& scenario)
    : dir_(std::move(directory)) {
  manifest_.command = std::move(command);
  manifest_.started_utc = utc_timestamp();
  const std::string text = to_json(scenario).dump(2) + "\n";
  manifest_.scenario_sha256 = sha256_hex(text);
  write("scenario.json", text);
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  const fs::path path = dir_ / name;
  write_file_atomic(path, content);
  files_.push_back(path);
  manifest_.outputs.push_back({name, sha256_hex(content), content.size()});
}

RunManifest OutputWriter::finish() {
  manifest_.finished_utc = utc_timestamp();
  write_file_atomic(dir_ / kManifestName, manifest_.to_json().dump(2) + "\n");
  return manifest_;
}

std::vector<std::string> verify_manifest(const fs::path& directory) {
  std::vector<std::string> problems;
  const fs::path path = directory / kManifestName;
  if (!fs::exists(path)) return {"missing " + path.string()};
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    return {std::string("unreadable manifest: ") + e.what()};
  }
  const RunManifest m = RunManifest::from_json(j);
  for (const auto& e : m.outputs) {
    const fs::path file = directory / e.file;
    if (!fs::exists(file)) {
      problems.push_back("missing " + e.file);
      continue;
    }
    const std::string content = read_file(file);
    if (content.size() != e.bytes || sha256_hex(content) != e.sha256) problems.push_back("checksum mismatch for " + e.file);
  }
  return problems;
}

}  // namespace floquet_ab::app
