#pragma once

#include <string>
#include <vector>

#include "cmaml/envs/task_distribution.hpp"
#include "cmaml/harness/kv_config.hpp"
#include "cmaml/meta/outer_loop.hpp"
#include "cmaml/safe_rl/config.hpp"

namespace cmaml::harness {

/// Fully resolved experiment description. Converts to and from the
/// line-oriented key-value format; to_kv(from_kv(x)) is the identity on the
/// resolved key set.
struct ExperimentConfig {
  std::string name = "experiment";
  envs::TaskDistribution dist;
  std::vector<int> hidden = {32, 32};
  safe_rl::InnerLoopConfig inner;
  meta::OuterConfig outer;
  std::vector<uint64_t> seeds = {1, 2, 3};
  int finetune_steps = 15;
  int finetune_tasks = 20;
  int eval_episodes = 8;
  std::string output_dir = "runs";
  int workers = 1;
  bool wall_clock = false;

  static ExperimentConfig from_kv(const KvConfig& kv);
  KvConfig to_kv() const;
  void validate() const;

  meta::MetaTrainSetup setup_for_seed(uint64_t seed) const;
};

std::string algorithm_name(safe_rl::InnerAlgorithm algorithm);
safe_rl::InnerAlgorithm algorithm_from_name(const std::string& name);
std::string baseline_name(meta::BaselineMode mode);
meta::BaselineMode baseline_from_name(const std::string& name);

}  // namespace cmaml::harness
