#pragma once

#include <vector>

#include "cmaml/envs/rollout.hpp"
#include "cmaml/envs/task.hpp"
#include "cmaml/safe_rl/batch.hpp"
#include "cmaml/safe_rl/config.hpp"
#include "cmaml/safe_rl/trust_region.hpp"

namespace cmaml::safe_rl {

struct AdaptStepMetrics {
  int step = 0;
  double mean_episode_return = 0.0;
  double mean_episode_cost = 0.0;
  double discounted_return = 0.0;
  double discounted_cost = 0.0;
  double j_c_estimate = 0.0;  // value fed to the dual update this step
  double kl = 0.0;
  double lambda = 0.0;  // after the dual step
  bool accepted = false;
};

struct AdaptationResult {
  Vec policy;
  double lambda = 0.0;
  Vec reward_critic;
  Vec cost_critic;
  std::vector<AdaptStepMetrics> trace;
  long env_steps = 0;
};

/// Task adaptation U_p: start from the meta policy, meta dual and meta cost
/// critic (reward critic randomly initialized), then iterate
/// {rollout, constrained policy step, critic fit} for adaptation_steps.
AdaptationResult adapt_task(const Policy& policy, const Vec& meta_policy,
                            double meta_lambda, const MlpSpec& critic_spec,
                            const Vec& meta_cost_critic, envs::CmdpTask& task,
                            const InnerLoopConfig& config, numkit::Rng& rng);

/// Convenience: n rollouts under one policy.
std::vector<Trajectory> collect_rollouts(envs::CmdpTask& task,
                                         const Policy& policy,
                                         const Vec& params, int episodes,
                                         numkit::Rng& rng);

}  // namespace cmaml::safe_rl
