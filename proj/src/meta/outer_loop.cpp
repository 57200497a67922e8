#include "cmaml/meta/outer_loop.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "cmaml/errors.hpp"
#include "cmaml/safe_rl/critic.hpp"

namespace cmaml::meta {

namespace {

enum StreamTag : uint64_t {
  kInitTag = 1,
  kSampleTag = 2,
  kAdaptTag = 3,
  kPostTag = 4,
  kMetaRolloutTag = 5,
  kPretrainTag = 6,
};

struct TaskOutcome {
  bool ok = false;
  Vec grad;
  double cost_estimate = 0.0;
  MetaTaskRow row;
  long env_steps = 0;
  std::string error;
};

void run_indexed(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int n_threads = std::min(workers, count);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

MetaTrainResult pretrain_single(const MetaTrainSetup& setup,
                                const Policy& policy, MetaTrainResult result) {
  const auto& outer = setup.outer;
  safe_rl::InnerLoopConfig inner = setup.inner;
  if (inner.algorithm == safe_rl::InnerAlgorithm::Trpo)
    inner.algorithm = safe_rl::InnerAlgorithm::TrpoLag;

  // match the meta run's environment-episode budget on a single task
  const long episode_budget =
      static_cast<long>(outer.outer_iterations) *
      (static_cast<long>(outer.meta_batch) *
           (static_cast<long>(inner.adaptation_steps) * inner.rollouts_per_step +
            outer.post_rollouts) +
       outer.meta_rollouts);
  inner.adaptation_steps = static_cast<int>(
      (episode_budget + inner.rollouts_per_step - 1) / inner.rollouts_per_step);

  const auto catalog = envs::catalog_task_seeds(setup.dist);
  auto task = envs::make_task(setup.dist, catalog.front());
  numkit::Rng rng(numkit::stream_seed(setup.seed, kPretrainTag));
  const auto adaptation = safe_rl::adapt_task(
      policy, result.state.meta_policy, result.state.meta_lambda,
      setup.critic_spec, result.state.meta_cost_critic, *task, inner, rng);

  result.state.meta_policy = adaptation.policy;
  result.state.meta_cost_critic = adaptation.cost_critic;
  result.state.meta_lambda = adaptation.lambda;
  result.state.outer_iteration = inner.adaptation_steps;
  result.env_steps = adaptation.env_steps;
  for (const auto& m : adaptation.trace) {
    MetaIterationRow row;
    row.iteration = m.step;
    row.meta_return = m.mean_episode_return;
    row.meta_cost = m.mean_episode_cost;
    row.meta_discounted_return = m.discounted_return;
    row.meta_discounted_cost = m.discounted_cost;
    row.lambda = m.lambda;
    row.dual_cost_signal = m.j_c_estimate;
    row.mean_inner_kl = m.kl;
    result.history.push_back(row);
  }
  return result;
}

}  // namespace

numkit::MlpSpec default_policy_spec(const envs::TaskDistribution& dist,
                                    const std::vector<int>& hidden) {
  numkit::MlpSpec spec;
  auto probe = envs::make_task(dist, envs::catalog_task_seeds(dist).front());
  spec.layer_sizes.push_back(probe->obs_dim());
  if (dist.family == envs::Family::PointNav)
    for (int h : hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(probe->discrete_actions() ? probe->action_count()
                                                       : probe->action_dim());
  spec.head = probe->discrete_actions() ? numkit::OutputHead::CategoricalPolicy
                                        : numkit::OutputHead::GaussianPolicy;
  return spec;
}

numkit::MlpSpec default_critic_spec(const envs::TaskDistribution& dist,
                                    const std::vector<int>& hidden) {
  numkit::MlpSpec spec;
  auto probe = envs::make_task(dist, envs::catalog_task_seeds(dist).front());
  spec.layer_sizes.push_back(probe->obs_dim());
  if (dist.family == envs::Family::PointNav)
    for (int h : hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(1);
  spec.head = numkit::OutputHead::ScalarValue;
  return spec;
}

MetaTrainResult meta_train(const MetaTrainSetup& setup) {
  setup.inner.validate();
  setup.outer.validate();
  const Policy policy(setup.policy_spec);

  OuterConfig outer = setup.outer;
  safe_rl::InnerLoopConfig inner = setup.inner;
  bool constrained = true;
  if (outer.baseline_mode == BaselineMode::MamlUnconstrained) {
    constrained = false;
    inner.algorithm = safe_rl::InnerAlgorithm::Trpo;
    outer.lambda_init = 0.0;
    outer.eta_init = 0.0;
  }

  MetaTrainResult result;
  numkit::Rng init_rng(numkit::stream_seed(setup.seed, kInitTag));
  result.state.meta_policy = policy.init_params(init_rng);
  result.state.meta_cost_critic =
      numkit::mlp_init_params(setup.critic_spec, init_rng);
  result.state.meta_lambda = outer.lambda_init;
  result.state.eta = outer.eta_init;

  if (outer.baseline_mode == BaselineMode::RandomInit) return result;
  if (outer.baseline_mode == BaselineMode::PretrainSingle)
    return pretrain_single(setup, policy, std::move(result));

  const int train_hi = setup.dist.count - outer.holdout;
  if (train_hi < outer.meta_batch)
    throw ConfigError("meta_train: catalog too small for B after holdout");
  const double d = setup.dist.cost_limit;
  const double gamma = setup.dist.gamma;

  for (int iter = 0; iter < outer.outer_iterations; ++iter) {
    numkit::Rng sample_rng(numkit::stream_seed(setup.seed, kSampleTag, iter));
    const auto task_seeds = envs::sample_task_seeds(
        setup.dist, outer.meta_batch, sample_rng, 0, train_hi);

    // fresh rollouts under the frozen meta-policy, round-robin over the batch
    std::vector<Trajectory> meta_rollouts;
    meta_rollouts.reserve(outer.meta_rollouts);
    for (int e = 0; e < outer.meta_rollouts; ++e) {
      auto task =
          envs::make_task(setup.dist, task_seeds[e % task_seeds.size()]);
      numkit::Rng rng(numkit::stream_seed(setup.seed, kMetaRolloutTag, iter, e));
      meta_rollouts.push_back(
          envs::rollout(*task, policy, result.state.meta_policy, rng));
      result.env_steps += meta_rollouts.back().length();
    }

    const double lambda_for_tasks = constrained ? result.state.meta_lambda : 0.0;
    std::vector<TaskOutcome> outcomes(task_seeds.size());
    run_indexed(
        static_cast<int>(task_seeds.size()), setup.workers, [&](int idx) {
          TaskOutcome& outcome = outcomes[idx];
          try {
            auto task = envs::make_task(setup.dist, task_seeds[idx]);
            numkit::Rng adapt_rng(numkit::stream_seed(setup.seed, kAdaptTag,
                                                      iter, task_seeds[idx]));
            const auto adaptation = safe_rl::adapt_task(
                policy, result.state.meta_policy, lambda_for_tasks,
                setup.critic_spec, result.state.meta_cost_critic, *task, inner,
                adapt_rng);
            numkit::Rng post_rng(numkit::stream_seed(setup.seed, kPostTag, iter,
                                                     task_seeds[idx]));
            const auto post = safe_rl::collect_rollouts(
                *task, policy, adaptation.policy, outer.post_rollouts, post_rng);
            outcome.grad =
                fomaml_task_gradient(policy, adaptation, lambda_for_tasks,
                                     setup.critic_spec, post, gamma);

            outcome.env_steps = adaptation.env_steps;
            double ret = 0, cost = 0, dret = 0, dcost = 0;
            for (const auto& traj : post) {
              const auto [r0, c0] = envs::episode_totals(traj);
              const auto [r1, c1] = envs::episode_return_and_cost(traj, gamma);
              ret += r0;
              cost += c0;
              dret += r1;
              dcost += c1;
              outcome.env_steps += traj.length();
            }
            const double e = static_cast<double>(post.size());
            outcome.row.iteration = iter;
            outcome.row.task_id = task_seeds[idx];
            outcome.row.adapted_return = ret / e;
            outcome.row.adapted_cost = cost / e;
            outcome.row.adapted_discounted_return = dret / e;
            outcome.row.adapted_discounted_cost = dcost / e;
            outcome.row.lambda_p = adaptation.lambda;
            double kl = 0;
            for (const auto& m : adaptation.trace) kl += m.kl;
            outcome.row.mean_kl = kl / adaptation.trace.size();
            outcome.cost_estimate =
                (inner.dual_cost_mode == safe_rl::DualCostMode::Discounted)
                    ? dcost / e
                    : cost / e;
            outcome.ok = true;
          } catch (const std::exception& e) {
            outcome.error = e.what();
          }
        });

    int failures = 0;
    for (const auto& outcome : outcomes)
      if (!outcome.ok) ++failures;
    if (2 * failures > static_cast<int>(outcomes.size()))
      throw NumericError("meta_train: more than half the tasks failed at iter " +
                         std::to_string(iter));

    Vec fomaml_term = Vec::Zero(result.state.meta_policy.size());
    std::vector<double> cost_estimates;
    MetaIterationRow row;
    row.iteration = iter;
    row.failed_tasks = failures;
    for (const auto& outcome : outcomes) {
      if (!outcome.ok) continue;
      fomaml_term += outcome.grad;
      cost_estimates.push_back(outcome.cost_estimate);
      result.task_rows.push_back(outcome.row);
      result.env_steps += outcome.env_steps;
      row.adapted_return += outcome.row.adapted_return;
      row.adapted_cost += outcome.row.adapted_cost;
      row.adapted_discounted_return += outcome.row.adapted_discounted_return;
      row.adapted_discounted_cost += outcome.row.adapted_discounted_cost;
      row.mean_inner_kl += outcome.row.mean_kl;
    }
    const double ok_count = static_cast<double>(cost_estimates.size());
    fomaml_term /= ok_count;
    row.adapted_return /= ok_count;
    row.adapted_cost /= ok_count;
    row.adapted_discounted_return /= ok_count;
    row.adapted_discounted_cost /= ok_count;
    row.mean_inner_kl /= ok_count;

    const Vec eta_term = eta_safety_gradient(
        policy, result.state.meta_policy, meta_rollouts, setup.critic_spec,
        result.state.meta_cost_critic, constrained ? result.state.eta : 0.0,
        gamma, outer.eta_term_mode);

    const Vec update = fomaml_term + eta_term;
    if ((update - (fomaml_term + eta_term)).norm() != 0.0)
      throw NumericError("meta_train: gradient decomposition violated");
    result.state.meta_policy += outer.meta_lr_policy * update;
    if (!result.state.meta_policy.allFinite())
      throw NumericError("meta_train: non-finite meta policy");

    double meta_ret = 0, meta_cost = 0, meta_dret = 0, meta_dcost = 0;
    for (const auto& traj : meta_rollouts) {
      const auto [r0, c0] = envs::episode_totals(traj);
      const auto [r1, c1] = envs::episode_return_and_cost(traj, gamma);
      meta_ret += r0;
      meta_cost += c0;
      meta_dret += r1;
      meta_dcost += c1;
    }
    const double me = static_cast<double>(meta_rollouts.size());
    row.meta_return = meta_ret / me;
    row.meta_cost = meta_cost / me;
    row.meta_discounted_return = meta_dret / me;
    row.meta_discounted_cost = meta_dcost / me;

    double mean_cost_signal = 0.0;
    for (double v : cost_estimates) mean_cost_signal += v;
    row.dual_cost_signal = mean_cost_signal / ok_count;

    double eta_signal = 0.0;
    for (const auto& traj : meta_rollouts)
      eta_signal += numkit::mlp_forward(setup.critic_spec,
                                        result.state.meta_cost_critic,
                                        traj.observations.row(0).transpose())[0];
    row.eta_signal = eta_signal / me;

    if (constrained) {
      if (outer.adaptive_lambda)
        result.state.meta_lambda =
            update_meta_lambda(result.state.meta_lambda, cost_estimates, d,
                               outer.meta_lr_lambda);
      if (outer.adaptive_eta)
        result.state.eta =
            update_eta(result.state.eta, meta_rollouts, setup.critic_spec,
                       result.state.meta_cost_critic, d, outer.meta_lr_eta);
      result.state.meta_cost_critic = train_meta_cost_critic(
          setup.critic_spec, std::move(result.state.meta_cost_critic),
          meta_rollouts, gamma, outer.critic_epochs, outer.critic_lr);
    }
    result.state.outer_iteration = iter + 1;
    row.lambda = result.state.meta_lambda;
    row.eta = result.state.eta;
    result.history.push_back(row);
  }
  return result;
}

MetaCheckpoint to_checkpoint(const MetaTrainSetup& setup,
                             const MetaTrainResult& result) {
  MetaCheckpoint checkpoint;
  checkpoint.seed = setup.seed;
  checkpoint.outer_iteration = result.state.outer_iteration;
  checkpoint.meta_lambda = result.state.meta_lambda;
  checkpoint.eta = result.state.eta;
  checkpoint.policy_spec = setup.policy_spec;
  checkpoint.critic_spec = setup.critic_spec;
  checkpoint.meta_policy = result.state.meta_policy;
  checkpoint.meta_cost_critic = result.state.meta_cost_critic;
  return checkpoint;
}

}  // namespace cmaml::meta
