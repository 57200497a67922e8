#include "cmaml/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "cmaml/errors.hpp"
#include "cmaml/harness/metrics.hpp"

namespace cmaml::harness {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool any = false;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        any = true;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (spec.has_reference) {
    if (!any) {
      y_min = y_max = spec.reference;
      any = true;
    }
    y_min = std::min(y_min, spec.reference);
    y_max = std::max(y_max, spec.reference);
  }
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  auto py = [&](double y) {
    return kMarginTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw IoError("plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title
      << "</text>\n";

  // axes
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop
      << "\" x2=\"" << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\""
      << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(xv) << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(py(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(yv) << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << spec.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">" << spec.y_label << "</text>\n";

  if (spec.has_reference) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(py(spec.reference))
        << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\""
        << num(py(spec.reference))
        << "\" stroke=\"#444444\" stroke-dasharray=\"6,4\" "
        << "class=\"reference\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w - 4 << "\" y=\""
        << num(py(spec.reference) - 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\" fill=\"#444444\">d = " << num(spec.reference)
        << "</text>\n";
  }

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    if (!s.x.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i)
        out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
      out << "\"/>\n";
    }
    out << "<text x=\"" << kMarginLeft + 8 << "\" y=\""
        << kMarginTop + 14 + 14 * static_cast<int>(si)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
        << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("plot: write failed: " + path);
}

std::vector<std::string> emit_plots(const std::vector<std::string>& csv_paths,
                                    const std::string& out_prefix,
                                    double cost_limit) {
  // series keyed by (phase, csv label, seed), aggregate rows only
  std::map<std::string, std::map<std::string, PlotSeries>> returns, costs;
  for (const auto& path : csv_paths) {
    std::string label = path;
    const auto slash = label.find_last_of('/');
    if (slash != std::string::npos) label = label.substr(slash + 1);
    const auto dot = label.rfind(".csv");
    if (dot != std::string::npos) label = label.substr(0, dot);

    for (const auto& row : read_metrics_csv(path)) {
      if (row.task_id != "agg") continue;
      const std::string key = label + "/seed" + std::to_string(row.seed);
      auto& ret = returns[row.phase][key];
      auto& cost = costs[row.phase][key];
      ret.label = cost.label = key;
      ret.x.push_back(row.iteration);
      ret.y.push_back(row.mean_episode_return);
      cost.x.push_back(row.iteration);
      cost.y.push_back(row.mean_episode_cost);
    }
    if (returns.empty()) {
      // header-only CSV still yields empty panels
      returns["fine_tune"];
      costs["fine_tune"];
    }
  }

  std::vector<std::string> written;
  for (const auto& [phase, by_key] : returns) {
    PlotSpec spec;
    spec.title = phase + ": mean episode return";
    spec.y_label = "mean episode return";
    std::vector<PlotSeries> series;
    for (const auto& [key, s] : by_key) series.push_back(s);
    const std::string path = out_prefix + "_" + phase + "_return.svg";
    write_svg_plot(path, spec, series);
    written.push_back(path);
  }
  for (const auto& [phase, by_key] : costs) {
    PlotSpec spec;
    spec.title = phase + ": mean episode cost";
    spec.y_label = "mean episode cost";
    spec.has_reference = true;
    spec.reference = cost_limit;
    std::vector<PlotSeries> series;
    for (const auto& [key, s] : by_key) series.push_back(s);
    const std::string path = out_prefix + "_" + phase + "_cost.svg";
    write_svg_plot(path, spec, series);
    written.push_back(path);
  }
  return written;
}

}  // namespace cmaml::harness
