#include "cmaml/safe_rl/adapt.hpp"

#include "cmaml/errors.hpp"
#include "cmaml/safe_rl/critic.hpp"

namespace cmaml::safe_rl {

std::vector<Trajectory> collect_rollouts(envs::CmdpTask& task,
                                         const Policy& policy,
                                         const Vec& params, int episodes,
                                         numkit::Rng& rng) {
  std::vector<Trajectory> out;
  out.reserve(episodes);
  for (int i = 0; i < episodes; ++i)
    out.push_back(envs::rollout(task, policy, params, rng));
  return out;
}

AdaptationResult adapt_task(const Policy& policy, const Vec& meta_policy,
                            double meta_lambda, const MlpSpec& critic_spec,
                            const Vec& meta_cost_critic, envs::CmdpTask& task,
                            const InnerLoopConfig& config, numkit::Rng& rng) {
  config.validate();
  if (meta_lambda < 0.0) throw ConfigError("adapt_task: meta lambda < 0");

  AdaptationResult result;
  result.policy = meta_policy;
  result.cost_critic = meta_cost_critic;
  result.reward_critic = numkit::mlp_init_params(critic_spec, rng);
  result.lambda =
      (config.algorithm == InnerAlgorithm::Trpo) ? 0.0 : meta_lambda;

  const double d = task.cost_limit();
  for (int step = 0; step < config.adaptation_steps; ++step) {
    const auto trajectories = collect_rollouts(
        task, policy, result.policy, config.rollouts_per_step, rng);
    const UpdateBatch batch = build_update_batch(
        trajectories, critic_spec, result.reward_critic, result.cost_critic,
        task.gamma(), config.gae_lambda, config.normalize_advantages,
        config.dual_cost_mode);
    result.env_steps += batch.env_steps;

    AdaptStepMetrics metrics;
    metrics.step = step;
    metrics.mean_episode_return = batch.mean_episode_return;
    metrics.mean_episode_cost = batch.mean_episode_cost;
    metrics.discounted_return = batch.mean_discounted_return;
    metrics.discounted_cost = batch.mean_discounted_cost;
    metrics.j_c_estimate = batch.j_c_estimate;

    switch (config.algorithm) {
      case InnerAlgorithm::Trpo: {
        const StepReport report =
            trpo_step(policy, result.policy, batch, batch.reward_adv, config);
        result.policy = report.params;
        metrics.kl = report.kl;
        metrics.accepted = report.accepted;
        break;
      }
      case InnerAlgorithm::TrpoLag: {
        const LagStepReport report = trpo_lag_step(
            policy, result.policy, result.lambda, batch, d, config);
        result.policy = report.step.params;
        result.lambda = report.lambda;
        metrics.kl = report.step.kl;
        metrics.accepted = report.step.accepted;
        break;
      }
      case InnerAlgorithm::Cpo: {
        const StepReport report =
            cpo_step(policy, result.policy, batch, d, config);
        result.policy = report.params;
        metrics.kl = report.kl;
        metrics.accepted = report.accepted;
        break;
      }
    }
    metrics.lambda = result.lambda;
    result.trace.push_back(metrics);

    result.reward_critic =
        fit_critic(critic_spec, result.reward_critic, batch.obs,
                   batch.reward_returns, config.critic_epochs, config.critic_lr);
    result.cost_critic =
        fit_critic(critic_spec, result.cost_critic, batch.obs,
                   batch.cost_returns, config.critic_epochs, config.critic_lr);
  }
  return result;
}

}  // namespace cmaml::safe_rl
