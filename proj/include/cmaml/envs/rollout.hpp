#pragma once

#include "cmaml/envs/task.hpp"
#include "cmaml/envs/trajectory.hpp"
#include "cmaml/numkit/policy.hpp"

namespace cmaml::envs {

/// Runs the policy in the task for at most `max_steps` steps (task horizon
/// when negative). Log-probs are recorded under the acting policy.
Trajectory rollout(CmdpTask& task, const numkit::Policy& policy,
                   const Vec& params, Rng& rng, int max_steps = -1);

}  // namespace cmaml::envs
