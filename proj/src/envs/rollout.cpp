#include "cmaml/envs/rollout.hpp"

#include <vector>

#include "cmaml/errors.hpp"

namespace cmaml::envs {

Trajectory rollout(CmdpTask& task, const numkit::Policy& policy,
                   const Vec& params, Rng& rng, int max_steps) {
  if (policy.obs_dim() != task.obs_dim())
    throw ShapeError("rollout: policy observation dimension mismatch");
  if (policy.discrete() != task.discrete_actions() ||
      (!policy.discrete() && policy.action_dim() != task.action_dim()) ||
      (policy.discrete() && policy.action_count() != task.action_count()))
    throw ShapeError("rollout: policy action space mismatch");
  if (max_steps < 0) max_steps = task.horizon();
  if (max_steps < 1) throw ShapeError("rollout: need at least one step");

  std::vector<Vec> obs_list, act_list;
  std::vector<double> rewards, costs, log_probs;
  std::vector<uint8_t> done;

  Vec obs = task.reset(rng);
  bool terminated = false;
  for (int t = 0; t < max_steps; ++t) {
    double lp = 0.0;
    const Vec action = policy.sample_action(params, obs, rng, &lp);
    if (!action.allFinite()) throw NumericError("rollout: non-finite action");
    const StepOutcome out = task.step(action, rng);
    obs_list.push_back(obs);
    act_list.push_back(action);
    rewards.push_back(out.reward);
    costs.push_back(out.cost);
    log_probs.push_back(lp);
    done.push_back(out.done ? 1 : 0);
    obs = out.obs;
    if (out.done) {
      terminated = true;
      break;
    }
  }

  const int t_len = static_cast<int>(rewards.size());
  Trajectory traj;
  traj.observations.resize(t_len, task.obs_dim());
  traj.actions.resize(t_len, policy.action_dim());
  traj.rewards.resize(t_len);
  traj.costs.resize(t_len);
  traj.log_probs.resize(t_len);
  for (int t = 0; t < t_len; ++t) {
    traj.observations.row(t) = obs_list[t].transpose();
    traj.actions.row(t) = act_list[t].transpose();
    traj.rewards[t] = rewards[t];
    traj.costs[t] = costs[t];
    traj.log_probs[t] = log_probs[t];
  }
  traj.done = std::move(done);
  traj.final_observation = obs;
  traj.truncated = !terminated;
  return traj;
}

}  // namespace cmaml::envs
