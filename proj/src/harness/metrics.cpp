#include "cmaml/harness/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "cmaml/errors.hpp"

namespace cmaml::harness {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row) {
  std::ostringstream out;
  out << row.phase << ',' << row.iteration << ',' << row.task_id << ','
      << format_value(row.mean_episode_return) << ','
      << format_value(row.mean_episode_cost) << ','
      << format_value(row.discounted_return) << ','
      << format_value(row.discounted_cost) << ','
      << format_value(row.lambda) << ',' << format_value(row.eta) << ','
      << format_value(row.kl) << ',' << format_value(row.wall_clock_s) << ','
      << row.seed;
  return out.str();
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path) {
  out_.open(path);
  if (!out_) throw IoError("metrics: cannot open " + path);
  out_ << kMetricsHeader << '\n';
}

void MetricsWriter::append(const MetricsRow& row) {
  out_ << format_metrics_row(row) << '\n';
  if (!out_) throw IoError("metrics: write failed: " + path_);
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("metrics: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw IoError("metrics: " + path + ": empty file (line 1)");
  if (line != kMetricsHeader)
    throw IoError("metrics: " + path + ": bad header (line 1)");

  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 12)
      throw IoError("metrics: " + path + ": line " + std::to_string(line_no) +
                    ": expected 12 fields, got " +
                    std::to_string(fields.size()));
    try {
      MetricsRow row;
      row.phase = fields[0];
      row.iteration = std::stoi(fields[1]);
      row.task_id = fields[2];
      row.mean_episode_return = std::stod(fields[3]);
      row.mean_episode_cost = std::stod(fields[4]);
      row.discounted_return = std::stod(fields[5]);
      row.discounted_cost = std::stod(fields[6]);
      row.lambda = std::stod(fields[7]);
      row.eta = std::stod(fields[8]);
      row.kl = std::stod(fields[9]);
      row.wall_clock_s = std::stod(fields[10]);
      row.seed = std::stoull(fields[11]);
      rows.push_back(row);
    } catch (const std::exception&) {
      throw IoError("metrics: " + path + ": line " + std::to_string(line_no) +
                    ": parse error");
    }
  }
  return rows;
}

}  // namespace cmaml::harness
