#pragma once

#include <string>
#include <vector>

namespace cmaml::harness {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool has_reference = false;  // horizontal reference (the cost limit d)
  double reference = 0.0;
};

/// Minimal deterministic SVG line plot: axes, tick labels, one polyline per
/// series, optional dashed horizontal reference line, text legend.
void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

/// Renders return-vs-iteration and cost-vs-iteration panels from metrics
/// CSVs (one series per file/seed, aggregate rows only, grouped by phase).
/// Cost panels draw the cost limit as a reference line. Returns the list of
/// files written.
std::vector<std::string> emit_plots(const std::vector<std::string>& csv_paths,
                                    const std::string& out_prefix,
                                    double cost_limit);

}  // namespace cmaml::harness
