#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmaml/harness/experiment_config.hpp"
#include "cmaml/harness/metrics.hpp"

namespace cmaml::harness {

/// Creates `<output_dir>/<name>-<hash8>` where the hash digests the resolved
/// config; existing directories are never reused (suffixes -2, -3, ...).
/// Writes the resolved config and the task manifest inside.
std::string prepare_output_dir(const ExperimentConfig& cfg);

struct MetaTrainOutputs {
  std::vector<std::string> checkpoints;  // one per seed
  std::string csv;
};

/// Meta-training across cfg.seeds: per-task and aggregate rows into
/// `<label>.csv`, checkpoints into `<label>_seed<seed>.ckpt`.
MetaTrainOutputs run_meta_train(const ExperimentConfig& cfg,
                                const std::string& dir,
                                const std::string& label = "meta_train");

/// Fine-tunes each held-out task from the per-seed checkpoints (random
/// initializations when `checkpoints` is empty). Emits per-task rows plus
/// aggregate rows whose values are arithmetic means over tasks.
std::string run_finetune(const ExperimentConfig& cfg, const std::string& dir,
                         const std::vector<std::string>& checkpoints,
                         const std::string& label);

/// Four-way initialization study: cmaml / maml / pretrained / random, each
/// meta-trained (where applicable) and fine-tuned on the same held-out tasks
/// with identical iteration grids.
void run_compare(const ExperimentConfig& cfg, const std::string& dir);

/// Paired eta ablation: adaptive eta versus eta frozen at zero, same seeds
/// and task samples, meta-training plus fine-tuning traces for both.
void run_ablate_eta(const ExperimentConfig& cfg, const std::string& dir);

struct OracleCheckOutcome {
  bool passed = false;
  int tasks_passed = 0;
  int tasks_total = 0;
  std::string report;
};

/// Inner-loop oracle equivalence on seeded 5x5 grid CMDPs: the cost limit is
/// set to half the unconstrained optimum's cost (so the constraint binds),
/// the learner runs `adaptation_steps` updates from a uniform policy, and the
/// exactly-evaluated result must reach `return_fraction` of the LP optimum
/// with cost at most d + cost_slack.
OracleCheckOutcome oracle_check(safe_rl::InnerAlgorithm algorithm, int n_tasks,
                                int pass_threshold, int adaptation_steps,
                                uint64_t seed, std::ostream* log = nullptr,
                                double return_fraction = 0.9,
                                double cost_slack = 0.5);

}  // namespace cmaml::harness
