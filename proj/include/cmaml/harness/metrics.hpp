#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace cmaml::harness {

/// One metrics record. `task_id` holds the task seed or "agg" for
/// cross-task aggregates. `wall_clock_s` is 0 unless timing was explicitly
/// enabled (timing breaks byte-identical reruns).
struct MetricsRow {
  std::string phase;  // meta_train | fine_tune
  int iteration = 0;
  std::string task_id = "agg";
  double mean_episode_return = 0.0;
  double mean_episode_cost = 0.0;
  double discounted_return = 0.0;
  double discounted_cost = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double kl = 0.0;
  double wall_clock_s = 0.0;
  uint64_t seed = 0;
};

inline constexpr const char* kMetricsHeader =
    "phase,iteration,task_id,mean_episode_return,mean_episode_cost,"
    "discounted_return,discounted_cost,lambda,eta,kl,wall_clock_s,seed";

std::string format_metrics_row(const MetricsRow& row);

/// Append-only CSV sink; writes the fixed header on creation, UTF-8, LF.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void append(const MetricsRow& row);

 private:
  std::ofstream out_;
  std::string path_;
};

/// Parses a metrics CSV; throws IoError naming the offending line.
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

}  // namespace cmaml::harness
