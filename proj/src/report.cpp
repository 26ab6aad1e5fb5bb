#include "rmt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/experiment.hpp"
#include "rmt/stats.hpp"

namespace rmt {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  if (!stream && !stream.eof()) throw IoError("read from '" + path + "' failed");
  return buffer.str();
}

void write_file_guarded(const std::string& path, const std::string& content,
                        bool overwrite) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw IoError("refusing to overwrite existing '" + path +
                  "' (pass the overwrite flag)");
  }
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) throw IoError("cannot open '" + path + "' for writing");
  stream << content;
  stream.flush();
  if (!stream) throw IoError("write to '" + path + "' failed");
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

// A record reconstructed far enough to re-run the serializers.
ResultRecord record_from_json(const json& j) {
  for (const char* key : {"artifact_version", "config_fingerprint", "config",
                          "experiment", "results"}) {
    if (!j.contains(key)) {
      throw MalformedRecordError(std::string("record is missing '") + key + "'");
    }
  }
  ResultRecord record;
  try {
    record.config = parse_config(j.at("config"));
    record.version = j.at("artifact_version").get<std::string>();
    record.fingerprint = j.at("config_fingerprint").get<std::string>();
    record.payload = j.at("results");
  } catch (const ConfigError& e) {
    throw MalformedRecordError(std::string("record config is invalid: ") + e.what());
  } catch (const json::exception& e) {
    throw MalformedRecordError(std::string("record field has the wrong type: ") +
                               e.what());
  }
  return record;
}

}  // namespace

json load_result_record(const std::string& record_path) {
  if (!std::filesystem::exists(record_path)) {
    throw IoError("record file '" + record_path + "' does not exist");
  }
  const std::string text = read_file(record_path);
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw MalformedRecordError("'" + record_path + "' is not a JSON object");
  }
  return parsed;
}

std::string render_tail_svg(const json& record) {
  ResultRecord rec = record_from_json(record);
  if (rec.config.experiment != ExperimentKind::tail &&
      rec.config.experiment != ExperimentKind::smallball) {
    throw MalformedRecordError("only tail and smallball records can be plotted");
  }
  const json& p = rec.payload;
  for (const char* key : {"t_grid", "p_hat", "ci_low", "ci_high"}) {
    if (!p.contains(key) || !p.at(key).is_array()) {
      throw MalformedRecordError(std::string("record results are missing '") + key +
                                 "'");
    }
  }

  struct Point {
    double log_t, log_p, log_lo, log_hi;
  };
  std::vector<Point> points;
  const auto& t_grid = p.at("t_grid");
  const auto& p_hat = p.at("p_hat");
  const auto& ci_low = p.at("ci_low");
  const auto& ci_high = p.at("ci_high");
  const std::size_t count =
      std::min({t_grid.size(), p_hat.size(), ci_low.size(), ci_high.size()});
  for (std::size_t idx = 0; idx < count; ++idx) {
    const double t = t_grid[idx].get<double>();
    const double prob = p_hat[idx].get<double>();
    const double lo = ci_low[idx].get<double>();
    const double hi = ci_high[idx].get<double>();
    if (t <= 0.0 || prob <= 0.0) continue;  // not representable in log-log
    points.push_back({std::log(t), std::log(prob),
                      std::log(std::max(lo, 1e-300)), std::log(std::max(hi, 1e-300))});
  }
  if (points.empty()) {
    throw MalformedRecordError("record has no plottable points (all p_hat zero)");
  }

  double min_x = points[0].log_t, max_x = points[0].log_t;
  double min_y = points[0].log_lo, max_y = points[0].log_hi;
  for (const Point& pt : points) {
    min_x = std::min(min_x, pt.log_t);
    max_x = std::max(max_x, pt.log_t);
    min_y = std::min(min_y, pt.log_lo);
    max_y = std::max(max_y, pt.log_hi);
  }
  if (max_x - min_x < 1e-12) {
    min_x -= 0.5;
    max_x += 0.5;
  }
  if (max_y - min_y < 1e-12) {
    min_y -= 0.5;
    max_y += 0.5;
  }
  const double pad_x = 0.06 * (max_x - min_x);
  const double pad_y = 0.08 * (max_y - min_y);
  min_x -= pad_x;
  max_x += pad_x;
  min_y -= pad_y;
  max_y += pad_y;

  const double width = 640.0, height = 480.0;
  const double left = 64.0, right = 24.0, top = 32.0, bottom = 48.0;
  const auto sx = [&](double log_t) {
    return left + (log_t - min_x) / (max_x - min_x) * (width - left - right);
  };
  const auto sy = [&](double log_p) {
    return height - bottom -
           (log_p - min_y) / (max_y - min_y) * (height - top - bottom);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\""
      << width - left - right << "\" height=\"" << height - top - bottom
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // Axis labels (log scale on both axes).
  svg << "  <text x=\"" << (left + (width - left - right) / 2.0) << "\" y=\""
      << height - 12.0 << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\">log t</text>\n";
  svg << "  <text x=\"16\" y=\"" << (top + (height - top - bottom) / 2.0)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << (top + (height - top - bottom) / 2.0) << ")\">log p</text>\n";

  // Fitted line, when the curve supports one.
  bool have_fit = false;
  double slope = 0.0, intercept = 0.0;
  if (p.contains("slope") && p.contains("slope_intercept")) {
    slope = p.at("slope").get<double>();
    intercept = p.at("slope_intercept").get<double>();
    have_fit = true;
  }
  if (have_fit) {
    const double x0 = min_x + pad_x / 2.0, x1 = max_x - pad_x / 2.0;
    svg << "  <line x1=\"" << fmt(sx(x0)) << "\" y1=\"" << fmt(sy(intercept + slope * x0))
        << "\" x2=\"" << fmt(sx(x1)) << "\" y2=\"" << fmt(sy(intercept + slope * x1))
        << "\" stroke=\"#c33\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }

  // CI whiskers, then the measured points on top.
  for (const Point& pt : points) {
    svg << "  <line x1=\"" << fmt(sx(pt.log_t)) << "\" y1=\"" << fmt(sy(pt.log_lo))
        << "\" x2=\"" << fmt(sx(pt.log_t)) << "\" y2=\"" << fmt(sy(pt.log_hi))
        << "\" stroke=\"#26c\" stroke-width=\"1\"/>\n";
  }
  std::ostringstream path;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    path << (idx == 0 ? "M" : " L") << fmt(sx(points[idx].log_t)) << " "
         << fmt(sy(points[idx].log_p));
  }
  svg << "  <path d=\"" << path.str()
      << "\" fill=\"none\" stroke=\"#26c\" stroke-width=\"1.5\"/>\n";
  for (const Point& pt : points) {
    svg << "  <circle cx=\"" << fmt(sx(pt.log_t)) << "\" cy=\"" << fmt(sy(pt.log_p))
        << "\" r=\"3\" fill=\"#26c\"/>\n";
  }

  // Title + slope annotation.
  const std::string title = experiment_kind_name(rec.config.experiment) +
                            "  n=" + std::to_string(rec.config.n) +
                            "  k=" + std::to_string(rec.config.k);
  svg << "  <text x=\"" << left << "\" y=\"22\" font-family=\"monospace\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  if (have_fit) {
    char slope_label[64];
    std::snprintf(slope_label, sizeof(slope_label), "slope=%.2f", slope);
    svg << "  <text x=\"" << width - right << "\" y=\"22\" text-anchor=\"end\" "
           "font-family=\"monospace\" font-size=\"14\" fill=\"#c33\">"
        << slope_label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_report(const std::string& record_path, const std::string& format,
                 const std::string& out_path, bool overwrite) {
  if (format != "csv" && format != "json" && format != "svg") {
    throw ConfigError("unknown report format '" + format +
                      "' (expected csv, json, or svg)");
  }
  const json record = load_result_record(record_path);
  std::string content;
  if (format == "json") {
    ResultRecord rec = record_from_json(record);
    content = result_to_json(rec).dump(2) + "\n";
  } else if (format == "csv") {
    ResultRecord rec = record_from_json(record);
    content = result_to_csv(rec);
  } else {
    content = render_tail_svg(record);  // validates before any file I/O
  }
  write_file_guarded(out_path, content, overwrite);
}

}  // namespace rmt
