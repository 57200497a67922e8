#pragma once

#include <vector>

#include "cmaml/envs/task.hpp"
#include "cmaml/meta/checkpoint.hpp"
#include "cmaml/safe_rl/adapt.hpp"

namespace cmaml::meta {

/// Initialization for fine-tuning: a policy plus the cost critic and dual it
/// carries (zero/fresh for random initializations).
struct PolicyInit {
  Vec policy;
  Vec cost_critic;
  double lambda = 0.0;
};

PolicyInit init_from_checkpoint(const MetaCheckpoint& checkpoint);

struct FineTuneRow {
  int iteration = 0;  // 0 = evaluation of the initialization, no update yet
  double mean_episode_return = 0.0;
  double mean_episode_cost = 0.0;
  double discounted_return = 0.0;
  double discounted_cost = 0.0;
  double kl = 0.0;
  double lambda = 0.0;
  bool accepted = false;
};

/// Runs the chosen constrained algorithm from the given initialization for
/// `steps` updates, logging mean episode return and cost per iteration
/// (iteration 0 is an evaluation-only row from `eval_episodes` rollouts).
std::vector<FineTuneRow> fine_tune(const numkit::Policy& policy,
                                   const MlpSpec& critic_spec,
                                   const PolicyInit& init, envs::CmdpTask& task,
                                   safe_rl::InnerLoopConfig config, int steps,
                                   int eval_episodes, numkit::Rng& rng);

}  // namespace cmaml::meta
