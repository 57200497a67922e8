#pragma once

#include <vector>

#include "cmaml/meta/config.hpp"
#include "cmaml/numkit/policy.hpp"
#include "cmaml/safe_rl/adapt.hpp"

namespace cmaml::meta {

using envs::Trajectory;
using numkit::MlpSpec;
using numkit::Policy;
using numkit::Vec;

/// First-order meta-gradient for one task: the score-function gradient of
/// E[R_p] - lambda * E[C_p] with respect to the adapted policy, applied to
/// the meta parameters through the identity Jacobian. Rollouts must be fresh
/// data collected under the adapted policy; the adapted critics serve as
/// baselines.
Vec fomaml_task_gradient(const Policy& policy,
                         const safe_rl::AdaptationResult& adaptation,
                         double meta_lambda, const MlpSpec& critic_spec,
                         const std::vector<Trajectory>& post_rollouts,
                         double gamma);

/// Safety term of the outer gradient: -eta times the score-function gradient
/// of the meta-policy's expected discounted cost, estimated from meta-policy
/// rollouts with the meta cost critic. Adding the result to an ascent update
/// pushes the meta-policy toward lower cost.
Vec eta_safety_gradient(const Policy& policy, const Vec& meta_params,
                        const std::vector<Trajectory>& meta_rollouts,
                        const MlpSpec& critic_spec, const Vec& meta_cost_critic,
                        double eta, double gamma, EtaTermMode mode);

/// Projected dual ascent: max(0, lambda + lr * (mean J_C - d)).
double update_meta_lambda(double meta_lambda,
                          const std::vector<double>& task_cost_estimates,
                          double cost_limit, double lr);

/// Projected dual ascent on eta driven by the critic's value at the initial
/// states of the meta rollouts. Throws on an empty rollout set.
double update_eta(double eta, const std::vector<Trajectory>& meta_rollouts,
                  const MlpSpec& critic_spec, const Vec& meta_cost_critic,
                  double cost_limit, double lr);

/// Regression of the critic onto discounted cost returns-to-go of the
/// meta-policy rollouts.
Vec train_meta_cost_critic(const MlpSpec& critic_spec, Vec critic,
                           const std::vector<Trajectory>& meta_rollouts,
                           double gamma, int epochs, double lr);

}  // namespace cmaml::meta
