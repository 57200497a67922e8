#pragma once

#include <vector>

#include "cmaml/envs/trajectory.hpp"
#include "cmaml/numkit/mlp.hpp"
#include "cmaml/safe_rl/config.hpp"

namespace cmaml::safe_rl {

using envs::Trajectory;
using numkit::Mat;
using numkit::MlpSpec;
using numkit::Vec;

/// Flattened per-update data. Reward advantages are normalized to mean 0 /
/// std 1 when enabled; cost advantages keep their raw scale (it carries the
/// constraint meaning). `cost_surr_weights` turn the importance-ratio cost
/// surrogate into an estimate of the change in J_C in the same units as
/// `j_c_estimate` (gamma^t per step, averaged over episodes).
struct UpdateBatch {
  Mat obs;
  Mat actions;
  Vec old_log_probs;
  Vec reward_adv;
  Vec cost_adv;
  Vec reward_returns;
  Vec cost_returns;
  Vec cost_surr_weights;
  double j_r_estimate = 0.0;  // mean per-episode discounted return
  double j_c_estimate = 0.0;  // per dual_cost_mode
  double mean_episode_return = 0.0;
  double mean_episode_cost = 0.0;
  double mean_discounted_return = 0.0;
  double mean_discounted_cost = 0.0;
  int episodes = 0;
  long env_steps = 0;
};

UpdateBatch build_update_batch(const std::vector<Trajectory>& trajectories,
                               const MlpSpec& critic_spec,
                               const Vec& reward_critic, const Vec& cost_critic,
                               double gamma, double gae_lambda,
                               bool normalize_reward_adv, DualCostMode mode);

}  // namespace cmaml::safe_rl
