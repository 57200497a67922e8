#include "cmaml/meta/gradients.hpp"

#include <cmath>

#include "cmaml/errors.hpp"
#include "cmaml/numkit/gae.hpp"
#include "cmaml/safe_rl/critic.hpp"

namespace cmaml::meta {

namespace {

// Discount weights gamma^t for one trajectory.
Vec discount_weights(int t_len, double gamma) {
  Vec w(t_len);
  double g = 1.0;
  for (int t = 0; t < t_len; ++t) {
    w[t] = g;
    g *= gamma;
  }
  return w;
}

struct SignalAdvantages {
  Vec reward;  // G^R_t - V_R(s_t), lambda_gae = 1
  Vec cost;    // same for the cost channel
};

SignalAdvantages mc_advantages(const Trajectory& traj,
                               const MlpSpec& critic_spec,
                               const Vec& reward_critic, const Vec& cost_critic,
                               double gamma, double gae_lambda) {
  const Vec values_r =
      safe_rl::critic_predict(critic_spec, reward_critic, traj.observations);
  const Vec values_c =
      safe_rl::critic_predict(critic_spec, cost_critic, traj.observations);
  double bootstrap_r = 0.0, bootstrap_c = 0.0;
  if (traj.truncated) {
    bootstrap_r =
        numkit::mlp_forward(critic_spec, reward_critic, traj.final_observation)[0];
    bootstrap_c =
        numkit::mlp_forward(critic_spec, cost_critic, traj.final_observation)[0];
  }
  SignalAdvantages adv;
  adv.reward = numkit::gae(traj.rewards, values_r, bootstrap_r, traj.done,
                           gamma, gae_lambda)
                   .advantages;
  adv.cost = numkit::gae(traj.costs, values_c, bootstrap_c, traj.done, gamma,
                         gae_lambda)
                 .advantages;
  return adv;
}

}  // namespace

void OuterConfig::validate() const {
  if (outer_iterations < 1) throw ConfigError("outer: N must be >= 1");
  if (meta_batch < 1) throw ConfigError("outer: B must be >= 1");
  if (meta_lr_policy <= 0.0 || meta_lr_lambda <= 0.0 || meta_lr_eta <= 0.0)
    throw ConfigError("outer: learning rates must be > 0");
  if (lambda_init < 0.0 || eta_init < 0.0)
    throw ConfigError("outer: dual initializations must be >= 0");
  if (meta_rollouts < 1 || post_rollouts < 1)
    throw ConfigError("outer: rollout counts must be >= 1");
  if (holdout < 0) throw ConfigError("outer: holdout must be >= 0");
}

Vec fomaml_task_gradient(const Policy& policy,
                         const safe_rl::AdaptationResult& adaptation,
                         double meta_lambda, const MlpSpec& critic_spec,
                         const std::vector<Trajectory>& post_rollouts,
                         double gamma) {
  if (post_rollouts.empty())
    throw ShapeError("fomaml_task_gradient: no rollouts");
  Vec grad = Vec::Zero(adaptation.policy.size());
  for (const auto& traj : post_rollouts) {
    if (traj.length() == 0) continue;
    const auto adv =
        mc_advantages(traj, critic_spec, adaptation.reward_critic,
                      adaptation.cost_critic, gamma, /*gae_lambda=*/1.0);
    const Vec weights =
        discount_weights(traj.length(), gamma)
            .cwiseProduct(adv.reward - meta_lambda * adv.cost);
    grad += policy.score_weighted_sum(adaptation.policy, traj.observations,
                                      traj.actions, weights);
  }
  grad /= static_cast<double>(post_rollouts.size());
  if (!grad.allFinite())
    throw NumericError("fomaml_task_gradient: non-finite gradient");
  return grad;
}

Vec eta_safety_gradient(const Policy& policy, const Vec& meta_params,
                        const std::vector<Trajectory>& meta_rollouts,
                        const MlpSpec& critic_spec, const Vec& meta_cost_critic,
                        double eta, double gamma, EtaTermMode mode) {
  if (eta < 0.0) throw ConfigError("eta_safety_gradient: eta must be >= 0");
  Vec grad = Vec::Zero(meta_params.size());
  if (eta == 0.0 || meta_rollouts.empty()) return grad;

  const double gae_lambda = (mode == EtaTermMode::PerStep) ? 0.0 : 1.0;
  for (const auto& traj : meta_rollouts) {
    if (traj.length() == 0) continue;
    const Vec values =
        safe_rl::critic_predict(critic_spec, meta_cost_critic, traj.observations);
    double bootstrap = 0.0;
    if (traj.truncated)
      bootstrap = numkit::mlp_forward(critic_spec, meta_cost_critic,
                                      traj.final_observation)[0];
    const Vec cost_adv = numkit::gae(traj.costs, values, bootstrap, traj.done,
                                     gamma, gae_lambda)
                             .advantages;
    const Vec weights =
        discount_weights(traj.length(), gamma).cwiseProduct(cost_adv);
    grad += policy.score_weighted_sum(meta_params, traj.observations,
                                      traj.actions, weights);
  }
  grad *= -eta / static_cast<double>(meta_rollouts.size());
  if (!grad.allFinite())
    throw NumericError("eta_safety_gradient: non-finite gradient");
  return grad;
}

double update_meta_lambda(double meta_lambda,
                          const std::vector<double>& task_cost_estimates,
                          double cost_limit, double lr) {
  if (meta_lambda < 0.0) throw ConfigError("update_meta_lambda: lambda < 0");
  if (task_cost_estimates.empty())
    throw ShapeError("update_meta_lambda: no task estimates");
  double mean = 0.0;
  for (double v : task_cost_estimates) mean += v;
  mean /= static_cast<double>(task_cost_estimates.size());
  return std::max(0.0, meta_lambda + lr * (mean - cost_limit));
}

double update_eta(double eta, const std::vector<Trajectory>& meta_rollouts,
                  const MlpSpec& critic_spec, const Vec& meta_cost_critic,
                  double cost_limit, double lr) {
  if (eta < 0.0) throw ConfigError("update_eta: eta < 0");
  if (meta_rollouts.empty()) throw ShapeError("update_eta: empty rollout set");
  double mean = 0.0;
  int count = 0;
  for (const auto& traj : meta_rollouts) {
    if (traj.length() == 0) continue;
    mean += numkit::mlp_forward(critic_spec, meta_cost_critic,
                                traj.observations.row(0).transpose())[0];
    ++count;
  }
  if (count == 0) throw ShapeError("update_eta: all rollouts empty");
  mean /= static_cast<double>(count);
  return std::max(0.0, eta + lr * (mean - cost_limit));
}

Vec train_meta_cost_critic(const MlpSpec& critic_spec, Vec critic,
                           const std::vector<Trajectory>& meta_rollouts,
                           double gamma, int epochs, double lr) {
  long total = 0;
  for (const auto& traj : meta_rollouts) total += traj.length();
  if (total == 0) return critic;

  numkit::Mat states(total, critic_spec.input_dim());
  Vec targets(total);
  long row = 0;
  for (const auto& traj : meta_rollouts) {
    // plain within-episode discounted cost-to-go, the same quantity the
    // episode-cost comparisons use (no critic bootstrap)
    const int t_len = traj.length();
    Vec cost_to_go(t_len);
    double acc = 0.0;
    for (int t = t_len - 1; t >= 0; --t) {
      acc = traj.costs[t] + gamma * (traj.done[t] ? 0.0 : acc);
      cost_to_go[t] = acc;
    }
    for (int t = 0; t < t_len; ++t) {
      states.row(row) = traj.observations.row(t);
      targets[row] = cost_to_go[t];
      ++row;
    }
  }
  return safe_rl::fit_critic(critic_spec, std::move(critic), states, targets,
                             epochs, lr);
}

}  // namespace cmaml::meta
