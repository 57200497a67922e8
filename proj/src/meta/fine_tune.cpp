#include "cmaml/meta/fine_tune.hpp"

#include "cmaml/errors.hpp"

namespace cmaml::meta {

PolicyInit init_from_checkpoint(const MetaCheckpoint& checkpoint) {
  PolicyInit init;
  init.policy = checkpoint.meta_policy;
  init.cost_critic = checkpoint.meta_cost_critic;
  init.lambda = checkpoint.meta_lambda;
  return init;
}

std::vector<FineTuneRow> fine_tune(const numkit::Policy& policy,
                                   const MlpSpec& critic_spec,
                                   const PolicyInit& init, envs::CmdpTask& task,
                                   safe_rl::InnerLoopConfig config, int steps,
                                   int eval_episodes, numkit::Rng& rng) {
  if (config.algorithm == safe_rl::InnerAlgorithm::Trpo)
    throw ConfigError("fine_tune: use trpo_lag or cpo");
  if (policy.param_count() != init.policy.size())
    throw ShapeError("fine_tune: initialization does not match policy shape");
  if (steps < 0) throw ConfigError("fine_tune: steps must be >= 0");
  if (eval_episodes < 1) throw ConfigError("fine_tune: eval_episodes >= 1");

  std::vector<FineTuneRow> rows;

  // iteration 0: evaluation of the initialization
  FineTuneRow eval_row;
  eval_row.iteration = 0;
  eval_row.lambda = init.lambda;
  const double gamma = task.gamma();
  for (int e = 0; e < eval_episodes; ++e) {
    const auto traj = envs::rollout(task, policy, init.policy, rng);
    const auto [r0, c0] = envs::episode_totals(traj);
    const auto [r1, c1] = envs::episode_return_and_cost(traj, gamma);
    eval_row.mean_episode_return += r0;
    eval_row.mean_episode_cost += c0;
    eval_row.discounted_return += r1;
    eval_row.discounted_cost += c1;
  }
  eval_row.mean_episode_return /= eval_episodes;
  eval_row.mean_episode_cost /= eval_episodes;
  eval_row.discounted_return /= eval_episodes;
  eval_row.discounted_cost /= eval_episodes;
  rows.push_back(eval_row);
  if (steps == 0) return rows;

  config.adaptation_steps = steps;
  const auto adaptation =
      safe_rl::adapt_task(policy, init.policy, init.lambda, critic_spec,
                          init.cost_critic, task, config, rng);
  for (const auto& m : adaptation.trace) {
    FineTuneRow row;
    row.iteration = m.step + 1;
    row.mean_episode_return = m.mean_episode_return;
    row.mean_episode_cost = m.mean_episode_cost;
    row.discounted_return = m.discounted_return;
    row.discounted_cost = m.discounted_cost;
    row.kl = m.kl;
    row.lambda = m.lambda;
    row.accepted = m.accepted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cmaml::meta
