#include "cmaml/safe_rl/batch.hpp"

#include "cmaml/errors.hpp"
#include "cmaml/numkit/gae.hpp"
#include "cmaml/safe_rl/critic.hpp"

namespace cmaml::safe_rl {

UpdateBatch build_update_batch(const std::vector<Trajectory>& trajectories,
                               const MlpSpec& critic_spec,
                               const Vec& reward_critic, const Vec& cost_critic,
                               double gamma, double gae_lambda,
                               bool normalize_reward_adv, DualCostMode mode) {
  if (trajectories.empty())
    throw ShapeError("build_update_batch: no trajectories");

  long total = 0;
  for (const auto& traj : trajectories) total += traj.length();

  UpdateBatch batch;
  const int obs_dim = static_cast<int>(trajectories.front().observations.cols());
  const int act_dim = static_cast<int>(trajectories.front().actions.cols());
  batch.obs.resize(total, obs_dim);
  batch.actions.resize(total, act_dim);
  batch.old_log_probs.resize(total);
  batch.reward_adv.resize(total);
  batch.cost_adv.resize(total);
  batch.reward_returns.resize(total);
  batch.cost_returns.resize(total);
  batch.cost_surr_weights.resize(total);
  batch.episodes = static_cast<int>(trajectories.size());
  batch.env_steps = total;

  long row = 0;
  for (const auto& traj : trajectories) {
    traj.validate();
    const int t_len = traj.length();
    const Vec values_r = critic_predict(critic_spec, reward_critic, traj.observations);
    const Vec values_c = critic_predict(critic_spec, cost_critic, traj.observations);
    double bootstrap_r = 0.0, bootstrap_c = 0.0;
    if (traj.truncated) {
      bootstrap_r = numkit::mlp_forward(critic_spec, reward_critic,
                                        traj.final_observation)[0];
      bootstrap_c = numkit::mlp_forward(critic_spec, cost_critic,
                                        traj.final_observation)[0];
    }
    const auto gae_r = numkit::gae(traj.rewards, values_r, bootstrap_r,
                                   traj.done, gamma, gae_lambda);
    const auto gae_c = numkit::gae(traj.costs, values_c, bootstrap_c, traj.done,
                                   gamma, gae_lambda);

    double discount = 1.0;
    for (int t = 0; t < t_len; ++t) {
      batch.obs.row(row + t) = traj.observations.row(t);
      batch.actions.row(row + t) = traj.actions.row(t);
      batch.old_log_probs[row + t] = traj.log_probs[t];
      batch.reward_adv[row + t] = gae_r.advantages[t];
      batch.cost_adv[row + t] = gae_c.advantages[t];
      batch.reward_returns[row + t] = gae_r.returns[t];
      batch.cost_returns[row + t] = gae_c.returns[t];
      const double w = (mode == DualCostMode::Discounted) ? discount : 1.0;
      batch.cost_surr_weights[row + t] = w / batch.episodes;
      discount *= gamma;
    }
    row += t_len;

    const auto [disc_r, disc_c] = episode_return_and_cost(traj, gamma);
    const auto [tot_r, tot_c] = episode_totals(traj);
    batch.mean_discounted_return += disc_r;
    batch.mean_discounted_cost += disc_c;
    batch.mean_episode_return += tot_r;
    batch.mean_episode_cost += tot_c;
    batch.j_c_estimate += (mode == DualCostMode::Discounted) ? disc_c : tot_c;
  }

  const double e = static_cast<double>(batch.episodes);
  batch.mean_discounted_return /= e;
  batch.mean_discounted_cost /= e;
  batch.mean_episode_return /= e;
  batch.mean_episode_cost /= e;
  batch.j_c_estimate /= e;
  batch.j_r_estimate = batch.mean_discounted_return;

  if (normalize_reward_adv) numkit::normalize_advantages(batch.reward_adv);
  return batch;
}

}  // namespace cmaml::safe_rl
