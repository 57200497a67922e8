#pragma once

#include <cstdint>
#include <vector>

#include "cmaml/envs/task_distribution.hpp"
#include "cmaml/meta/checkpoint.hpp"
#include "cmaml/meta/config.hpp"
#include "cmaml/meta/gradients.hpp"
#include "cmaml/safe_rl/adapt.hpp"

namespace cmaml::meta {

struct MetaState {
  Vec meta_policy;
  Vec meta_cost_critic;
  double meta_lambda = 0.0;
  double eta = 0.0;
  int outer_iteration = 0;
};

/// Aggregate metrics, one row per outer iteration. `dual_cost_signal` is the
/// mean adapted-policy cost estimate fed to the meta-lambda update and
/// `eta_signal` the mean initial-state critic value fed to the eta update.
struct MetaIterationRow {
  int iteration = 0;
  double meta_return = 0.0;
  double meta_cost = 0.0;
  double meta_discounted_return = 0.0;
  double meta_discounted_cost = 0.0;
  double adapted_return = 0.0;
  double adapted_cost = 0.0;
  double adapted_discounted_return = 0.0;
  double adapted_discounted_cost = 0.0;
  double lambda = 0.0;  // after this iteration's dual step
  double eta = 0.0;
  double dual_cost_signal = 0.0;
  double eta_signal = 0.0;
  double mean_inner_kl = 0.0;
  int failed_tasks = 0;
};

struct MetaTaskRow {
  int iteration = 0;
  uint64_t task_id = 0;
  double adapted_return = 0.0;
  double adapted_cost = 0.0;
  double adapted_discounted_return = 0.0;
  double adapted_discounted_cost = 0.0;
  double lambda_p = 0.0;
  double mean_kl = 0.0;
};

struct MetaTrainSetup {
  envs::TaskDistribution dist;
  safe_rl::InnerLoopConfig inner;
  OuterConfig outer;
  numkit::MlpSpec policy_spec;
  numkit::MlpSpec critic_spec;
  uint64_t seed = 0;
  int workers = 1;
};

struct MetaTrainResult {
  MetaState state;
  std::vector<MetaIterationRow> history;
  std::vector<MetaTaskRow> task_rows;
  long env_steps = 0;
};

/// Algorithm-1 outer loop (or the requested baseline): sample B tasks, adapt
/// each with the inner optimizer, average the first-order task gradients, add
/// the eta safety term, ascend the meta-policy and update lambda, eta and the
/// meta cost critic. Tasks that throw are skipped; more than half failing
/// aborts the run.
MetaTrainResult meta_train(const MetaTrainSetup& setup);

MetaCheckpoint to_checkpoint(const MetaTrainSetup& setup,
                             const MetaTrainResult& result);

numkit::MlpSpec default_policy_spec(const envs::TaskDistribution& dist,
                                    const std::vector<int>& hidden = {32, 32});
numkit::MlpSpec default_critic_spec(const envs::TaskDistribution& dist,
                                    const std::vector<int>& hidden = {32, 32});

}  // namespace cmaml::meta
