#include <doctest.h>

#include <cmath>
#include <limits>

#include "cmaml/envs/rollout.hpp"
#include "cmaml/envs/tabular.hpp"
#include "cmaml/errors.hpp"
#include "cmaml/oracle/cmdp_oracle.hpp"
#include "cmaml/safe_rl/adapt.hpp"
#include "cmaml/safe_rl/batch.hpp"
#include "cmaml/safe_rl/critic.hpp"
#include "cmaml/numkit/cg.hpp"
#include "cmaml/safe_rl/trust_region.hpp"

using namespace cmaml;
using numkit::Mat;
using numkit::MlpSpec;
using numkit::Policy;
using numkit::Rng;
using numkit::Vec;
using safe_rl::InnerAlgorithm;
using safe_rl::InnerLoopConfig;
using safe_rl::UpdateBatch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MlpSpec tabular_policy_spec(int states = 25, int actions = 4) {
  MlpSpec spec;
  spec.layer_sizes = {states, actions};
  spec.head = numkit::OutputHead::CategoricalPolicy;
  return spec;
}

MlpSpec tabular_critic_spec(int states = 25) {
  MlpSpec spec;
  spec.layer_sizes = {states, 1};
  spec.head = numkit::OutputHead::ScalarValue;
  return spec;
}

MlpSpec gaussian_policy_spec(int obs, int act) {
  MlpSpec spec;
  spec.layer_sizes = {obs, act};
  spec.head = numkit::OutputHead::GaussianPolicy;
  return spec;
}

// Random synthetic batch for a gaussian policy (no environment involved).
UpdateBatch synthetic_batch(const Policy& policy, const Vec& params, int n,
                            Rng& rng, double cost_scale = 1.0) {
  UpdateBatch batch;
  const int obs_dim = policy.obs_dim();
  const int act_dim = policy.action_dim();
  batch.obs.resize(n, obs_dim);
  batch.actions.resize(n, act_dim);
  batch.old_log_probs.resize(n);
  batch.reward_adv.resize(n);
  batch.cost_adv.resize(n);
  batch.cost_surr_weights = Vec::Constant(n, 1.0 / n);
  batch.episodes = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < obs_dim; ++j) batch.obs(i, j) = rng.uniform(-1.5, 1.5);
    const Vec obs = batch.obs.row(i).transpose();
    double lp = 0.0;
    const Vec action = policy.sample_action(params, obs, rng, &lp);
    batch.actions.row(i) = action.transpose();
    batch.old_log_probs[i] = lp;
    batch.reward_adv[i] = rng.uniform(-1.0, 1.0);
    batch.cost_adv[i] = cost_scale * rng.uniform(-1.0, 1.0);
  }
  return batch;
}

// Extract the tabular policy matrix by evaluating the net on one-hot states.
Mat extract_policy(const Policy& policy, const Vec& params, int states) {
  Mat out(states, policy.action_count());
  for (int s = 0; s < states; ++s) {
    Vec one_hot = Vec::Zero(states);
    one_hot[s] = 1.0;
    out.row(s) =
        numkit::categorical_probs(policy.dist_params(params, one_hot))
            .transpose();
  }
  return out;
}

// Alternating deterministic 2-state CMDP (actions change rewards/costs only).
envs::TabularCmdp two_state_cmdp() {
  envs::TabularCmdp model;
  model.state_count = 2;
  model.action_count = 2;
  model.transition.assign(8, 0.0);
  model.reward.assign(8, 0.0);
  model.cost.assign(8, 0.0);
  for (int s = 0; s < 2; ++s) {
    const int other = 1 - s;
    for (int a = 0; a < 2; ++a) {
      model.transition[model.idx(s, a, other)] = 1.0;
      model.reward[model.idx(s, a, other)] =
          (a == 0) ? (s == 0 ? 1.0 : 0.6) : 0.2;
      model.cost[model.idx(s, a, other)] = (a == 0) ? 1.0 : 0.0;
    }
  }
  model.initial_dist = Vec::Zero(2);
  model.initial_dist[0] = 1.0;
  model.validate();
  return model;
}

}  // namespace

TEST_CASE("build_update_batch: normalization contract") {
  const auto model = envs::build_grid_cmdp(envs::make_grid_params(4));
  envs::GridTaskParams params = envs::make_grid_params(4);
  params.horizon = 30;
  envs::TabularTask task(params);
  const Policy policy(tabular_policy_spec());
  Rng rng(3);
  const Vec theta = policy.init_params(rng);
  const auto trajs = safe_rl::collect_rollouts(task, policy, theta, 6, rng);

  const auto critic_spec = tabular_critic_spec();
  Rng crng(5);
  const Vec critic = numkit::mlp_init_params(critic_spec, crng);
  const auto batch = safe_rl::build_update_batch(
      trajs, critic_spec, critic, critic, 0.95, 0.95, true,
      safe_rl::DualCostMode::Discounted);

  CHECK(std::abs(batch.reward_adv.mean()) <= 1e-6);
  const double var =
      (batch.reward_adv.array() - batch.reward_adv.mean()).square().sum() /
      batch.reward_adv.size();
  CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-6);

  // cost advantages keep their raw scale: rebuild without normalization
  const auto raw = safe_rl::build_update_batch(
      trajs, critic_spec, critic, critic, 0.95, 0.95, false,
      safe_rl::DualCostMode::Discounted);
  CHECK(batch.cost_adv == raw.cost_adv);
  (void)model;
}

TEST_CASE("trpo_step: zero advantages leave the policy unchanged") {
  const Policy policy(gaussian_policy_spec(3, 2));
  Rng rng(7);
  const Vec params = policy.init_params(rng);
  auto batch = synthetic_batch(policy, params, 40, rng);
  InnerLoopConfig config;
  const auto report = safe_rl::trpo_step(policy, params, batch,
                                         Vec::Zero(batch.obs.rows()), config);
  CHECK_FALSE(report.accepted);
  CHECK(report.params == params);
}

TEST_CASE("trpo_step: accepted steps satisfy the KL acceptance bound") {
  const Policy policy(gaussian_policy_spec(4, 2));
  Rng rng(11);
  Vec params = policy.init_params(rng);
  InnerLoopConfig config;
  int accepted = 0;
  for (int k = 0; k < 20; ++k) {
    auto batch = synthetic_batch(policy, params, 60, rng);
    const auto report =
        safe_rl::trpo_step(policy, params, batch, batch.reward_adv, config);
    if (report.accepted) {
      ++accepted;
      CHECK(report.kl <= 1.5 * config.kl_threshold);
      CHECK(report.surrogate_improvement > 0.0);
      // verify the recorded KL against a direct recomputation
      CHECK(policy.mean_kl(report.params, params, batch.obs) ==
            doctest::Approx(report.kl).epsilon(1e-12));
      params = report.params;
    }
  }
  CHECK(accepted >= 15);
}

TEST_CASE("trpo_step surrogate improvement tracks exact DP improvement") {
  // deterministic-transition 2-state CMDP, exact advantages, gamma^t weights
  const auto model = two_state_cmdp();
  const double gamma = 0.9;
  const int horizon = 60;

  const auto policy_spec = tabular_policy_spec(2, 2);
  const Policy policy(policy_spec);
  Rng rng(13);
  Vec params = 0.3 * policy.init_params(rng);

  const Mat pi_old = extract_policy(policy, params, 2);
  const auto values = oracle::exact_policy_eval(model, pi_old, gamma);

  envs::TabularTask task(model, 0, gamma, kInf, horizon, {});
  const int episodes = 200;
  std::vector<envs::Trajectory> trajs;
  for (int e = 0; e < episodes; ++e)
    trajs.push_back(envs::rollout(task, policy, params, rng));

  // manual batch with exact advantages and per-episode gamma^t weights
  long total = 0;
  for (const auto& traj : trajs) total += traj.length();
  UpdateBatch batch;
  batch.obs.resize(total, 2);
  batch.actions.resize(total, 1);
  batch.old_log_probs.resize(total);
  batch.reward_adv.resize(total);
  batch.cost_adv = Vec::Zero(total);
  batch.cost_surr_weights.resize(total);
  batch.episodes = episodes;
  long row = 0;
  Vec gamma_weights(total);
  for (const auto& traj : trajs) {
    double g = 1.0;
    for (int t = 0; t < traj.length(); ++t, ++row) {
      batch.obs.row(row) = traj.observations.row(t);
      batch.actions.row(row) = traj.actions.row(t);
      batch.old_log_probs[row] = traj.log_probs[t];
      int s = 0;
      traj.observations.row(t).maxCoeff(&s);
      const int a = static_cast<int>(traj.actions(t, 0));
      batch.reward_adv[row] = values.a(s, a);
      gamma_weights[row] = g / episodes;
      g *= gamma;
    }
  }
  batch.cost_surr_weights = gamma_weights;

  InnerLoopConfig config;
  config.kl_threshold = 0.001;  // keep the step first-order
  const auto report =
      safe_rl::trpo_step(policy, params, batch, batch.reward_adv, config);
  REQUIRE(report.accepted);

  // gamma^t-weighted surrogate improvement, computed directly
  double surr = 0.0;
  for (long i = 0; i < total; ++i) {
    const double lp = policy.log_prob(report.params, batch.obs.row(i).transpose(),
                                      batch.actions.row(i).transpose());
    surr += gamma_weights[i] *
            (std::exp(lp - batch.old_log_probs[i]) - 1.0) * batch.reward_adv[i];
  }

  const Mat pi_new = extract_policy(policy, report.params, 2);
  const auto [j_new, c_new] = oracle::exact_return_and_cost(model, pi_new, gamma);
  const auto [j_old, c_old] = oracle::exact_return_and_cost(model, pi_old, gamma);
  const double exact_gain = j_new - j_old;
  REQUIRE(exact_gain > 0.0);
  CHECK(std::abs(surr - exact_gain) <= 0.05 * std::abs(exact_gain));
}

TEST_CASE("trpo_lag_step: reduction and dual update rules") {
  const Policy policy(gaussian_policy_spec(3, 2));
  Rng rng(17);
  const Vec params = policy.init_params(rng);
  auto batch = synthetic_batch(policy, params, 50, rng);
  InnerLoopConfig config;

  SUBCASE("lambda = 0 matches plain trpo on reward advantages") {
    batch.j_c_estimate = 0.3;
    const auto lag = safe_rl::trpo_lag_step(policy, params, 0.0, batch,
                                            /*cost_limit=*/1.0, config);
    const auto plain =
        safe_rl::trpo_step(policy, params, batch, batch.reward_adv, config);
    CHECK(lag.step.params == plain.params);
    CHECK(lag.step.kl == plain.kl);
  }
  SUBCASE("cost at the limit leaves lambda unchanged") {
    batch.j_c_estimate = 1.0;
    const auto lag =
        safe_rl::trpo_lag_step(policy, params, 0.4, batch, 1.0, config);
    CHECK(lag.lambda == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("unit violation moves lambda by exactly the learning rate") {
    batch.j_c_estimate = 2.0;
    config.lambda_lr = 0.05;
    const auto lag =
        safe_rl::trpo_lag_step(policy, params, 0.4, batch, 1.0, config);
    CHECK(lag.lambda == doctest::Approx(0.45).epsilon(1e-12));
  }
  SUBCASE("lambda is projected at zero") {
    batch.j_c_estimate = 0.0;
    config.lambda_lr = 10.0;
    const auto lag =
        safe_rl::trpo_lag_step(policy, params, 0.4, batch, 1.0, config);
    CHECK(lag.lambda == 0.0);
  }
  SUBCASE("dual sign property") {
    config.lambda_lr = 0.05;
    for (double jc : {0.2, 0.8, 1.2, 3.0}) {
      batch.j_c_estimate = jc;
      const auto lag =
          safe_rl::trpo_lag_step(policy, params, 0.5, batch, 1.0, config);
      if (jc > 1.0) CHECK(lag.lambda > 0.5);
      if (jc < 1.0) CHECK(lag.lambda < 0.5);
      CHECK(lag.lambda >= 0.0);
    }
  }
}

TEST_CASE("cpo_step: degenerate cost gradient falls back to trpo") {
  const Policy policy(gaussian_policy_spec(3, 2));
  Rng rng(19);
  const Vec params = policy.init_params(rng);
  auto batch = synthetic_batch(policy, params, 50, rng, /*cost_scale=*/0.0);
  batch.j_c_estimate = 0.1;
  InnerLoopConfig config;
  const auto cpo = safe_rl::cpo_step(policy, params, batch, /*d=*/5.0, config);
  const auto trpo =
      safe_rl::trpo_step(policy, params, batch, batch.reward_adv, config);
  CHECK(cpo.params == trpo.params);
}

TEST_CASE("cpo_step: inactive constraint reproduces the trpo direction") {
  const Policy policy(gaussian_policy_spec(3, 2));
  Rng rng(23);
  const Vec params = policy.init_params(rng);
  auto batch = synthetic_batch(policy, params, 60, rng, /*cost_scale=*/0.3);
  batch.j_c_estimate = 0.1;  // far below the limit
  InnerLoopConfig config;
  const double d = 10.0;

  const auto cpo = safe_rl::cpo_step(policy, params, batch, d, config);
  const auto trpo =
      safe_rl::trpo_step(policy, params, batch, batch.reward_adv, config);
  REQUIRE(cpo.accepted);
  REQUIRE(trpo.accepted);
  CHECK((cpo.params - trpo.params).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("cpo_step: infeasible start triggers a cost-reducing recovery") {
  const Policy policy(gaussian_policy_spec(3, 2));
  Rng rng(29);
  const Vec params = policy.init_params(rng);
  auto batch = synthetic_batch(policy, params, 60, rng, /*cost_scale=*/1.0);
  batch.j_c_estimate = 50.0;  // far beyond the limit: c^2/s >> 2*eps
  InnerLoopConfig config;
  const auto report = safe_rl::cpo_step(policy, params, batch, 1.0, config);
  CHECK(report.recovery);
  if (report.accepted) {
    // predicted linearized cost strictly lower after the step
    double before = 0.0, after = 0.0;
    for (int i = 0; i < batch.obs.rows(); ++i) {
      const Vec obs = batch.obs.row(i).transpose();
      const Vec act = batch.actions.row(i).transpose();
      const double w = batch.cost_surr_weights[i] * batch.cost_adv[i];
      before += w;  // ratio = 1 at the old params
      after += w * std::exp(policy.log_prob(report.params, obs, act) -
                            batch.old_log_probs[i]);
    }
    CHECK(after < before);
  }
}

TEST_CASE("cpo dual matches a dense grid search over (lambda, nu)") {
  const Policy policy(gaussian_policy_spec(2, 2));  // 8 params <= 30
  Rng rng(31);
  const Vec params = policy.init_params(rng);
  InnerLoopConfig config;

  for (int scenario = 0; scenario < 6; ++scenario) {
    auto batch = synthetic_batch(policy, params, 50, rng);
    const double c = rng.uniform(-0.4, 0.4);

    const int n = static_cast<int>(batch.obs.rows());
    const Vec g = policy.score_weighted_sum(params, batch.obs, batch.actions,
                                            batch.reward_adv) /
                  static_cast<double>(n);
    const Vec b_vec = policy.score_weighted_sum(
        params, batch.obs, batch.actions,
        batch.cost_adv.cwiseProduct(batch.cost_surr_weights).eval());
    auto fvp = [&](const Vec& v) {
      return policy.fisher_vector_product(params, batch.obs, v, config.damping);
    };
    const Vec hinv_g = numkit::conjugate_gradient(fvp, g, 50, 1e-12).x;
    const Vec hinv_b = numkit::conjugate_gradient(fvp, b_vec, 50, 1e-12).x;
    const double q = g.dot(hinv_g);
    const double r = g.dot(hinv_b);
    const double s = b_vec.dot(hinv_b);
    const double eps = config.kl_threshold;
    if (c > 0.0 && c * c / s > 2.0 * eps) continue;  // recovery regime

    const auto dual = safe_rl::solve_cpo_dual(q, r, s, c, eps);
    REQUIRE(dual.feasible);

    auto dual_value = [&](double lam, double nu) {
      return -(q - 2.0 * nu * r + nu * nu * s) / (2.0 * lam) + nu * c -
             lam * eps;
    };
    const double analytic = dual_value(dual.lambda, dual.nu);

    // dense grid: log-spaced lambda around the TRPO scale, linear nu
    const double lam_scale = std::sqrt(q / (2.0 * eps));
    double best = -kInf;
    for (int i = 0; i < 1200; ++i) {
      const double lam =
          lam_scale * std::pow(10.0, -4.0 + 8.0 * i / 1199.0);
      const double nu_max = (std::abs(r) + lam * std::abs(c)) / s + 1.0;
      for (int j = 0; j < 600; ++j) {
        const double nu = nu_max * j / 599.0;
        best = std::max(best, dual_value(lam, nu));
      }
    }
    CHECK(analytic >= best - 1e-9);  // grid never beats the analytic solution
    CHECK(std::abs(analytic - best) <= 1e-3 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("fit_critic: zero targets, capacity-1 fit, descent property") {
  const auto spec = tabular_critic_spec(6);
  Rng rng(37);
  Vec params = numkit::mlp_init_params(spec, rng);
  Mat states = Mat::Identity(6, 6);

  SUBCASE("all-zero targets drive the loss below 1e-3") {
    const Vec fitted =
        safe_rl::fit_critic(spec, params, states, Vec::Zero(6), 500, 0.5);
    CHECK(safe_rl::critic_loss(spec, fitted, states, Vec::Zero(6)) < 1e-3);
  }
  SUBCASE("single state converges to its target") {
    Mat one(1, 6);
    one.setZero();
    one(0, 2) = 1.0;
    Vec target(1);
    target << 7.0;
    const Vec fitted =
        safe_rl::fit_critic(spec, params, one, target, 500, 0.1);
    CHECK(std::abs(numkit::mlp_forward(spec, fitted, one.row(0).transpose())[0] -
                   7.0) <= 0.01);
  }
  SUBCASE("loss after fitting never exceeds the initial loss") {
    Rng trng(41);
    Vec targets(6);
    for (int i = 0; i < 6; ++i) targets[i] = trng.uniform(-3.0, 3.0);
    const double before = safe_rl::critic_loss(spec, params, states, targets);
    const Vec fitted = safe_rl::fit_critic(spec, params, states, targets, 50, 0.2);
    CHECK(safe_rl::critic_loss(spec, fitted, states, targets) <= before);
  }
}

TEST_CASE("adapt_task: determinism and trace invariants") {
  envs::GridTaskParams grid = envs::make_grid_params(6);
  grid.horizon = 40;
  grid.cost_limit = 0.3;
  const Policy policy(tabular_policy_spec());
  const auto critic_spec = tabular_critic_spec();

  InnerLoopConfig config;
  config.algorithm = InnerAlgorithm::TrpoLag;
  config.adaptation_steps = 6;
  config.rollouts_per_step = 5;
  config.kl_threshold = 0.05;
  config.critic_epochs = 20;
  config.critic_lr = 0.3;

  const Vec init = Vec::Zero(policy.param_count());
  const Vec critic0 = Vec::Zero(critic_spec.param_count());

  envs::TabularTask task_a(grid), task_b(grid);
  Rng rng_a(55), rng_b(55);
  const auto res_a = safe_rl::adapt_task(policy, init, 0.1, critic_spec,
                                         critic0, task_a, config, rng_a);
  const auto res_b = safe_rl::adapt_task(policy, init, 0.1, critic_spec,
                                         critic0, task_b, config, rng_b);
  CHECK(res_a.policy == res_b.policy);
  CHECK(res_a.lambda == res_b.lambda);
  CHECK(res_a.reward_critic == res_b.reward_critic);

  CHECK(res_a.lambda >= 0.0);
  for (const auto& m : res_a.trace) {
    CHECK(m.lambda >= 0.0);
    if (m.accepted) CHECK(m.kl <= 1.5 * config.kl_threshold);
  }
}

TEST_CASE("adapt_task: lambda dual sign property along the trace") {
  envs::GridTaskParams grid = envs::make_grid_params(9);
  grid.horizon = 40;
  grid.cost_limit = 0.2;
  const Policy policy(tabular_policy_spec());
  const auto critic_spec = tabular_critic_spec();

  InnerLoopConfig config;
  config.algorithm = InnerAlgorithm::TrpoLag;
  config.adaptation_steps = 12;
  config.rollouts_per_step = 6;
  config.kl_threshold = 0.05;
  config.lambda_lr = 0.2;
  config.critic_epochs = 15;
  config.critic_lr = 0.3;

  envs::TabularTask task(grid);
  Rng rng(77);
  const auto result =
      safe_rl::adapt_task(policy, Vec::Zero(policy.param_count()), 0.0,
                          critic_spec, Vec::Zero(critic_spec.param_count()),
                          task, config, rng);
  double lambda_before = 0.0;
  for (const auto& m : result.trace) {
    if (m.j_c_estimate > grid.cost_limit) {
      CHECK(m.lambda > lambda_before - 1e-12);
      CHECK(m.lambda == doctest::Approx(lambda_before +
                                        config.lambda_lr *
                                            (m.j_c_estimate - grid.cost_limit))
                            .epsilon(1e-9));
    } else if (m.j_c_estimate < grid.cost_limit) {
      CHECK(m.lambda <= lambda_before + 1e-12);
    }
    CHECK(m.lambda >= 0.0);
    lambda_before = m.lambda;
  }
}

TEST_CASE("trpo_lag with infinite cost limit reproduces plain trpo bitwise") {
  envs::GridTaskParams grid = envs::make_grid_params(12);
  grid.horizon = 40;
  const Policy policy(tabular_policy_spec());
  const auto critic_spec = tabular_critic_spec();

  InnerLoopConfig config;
  config.adaptation_steps = 5;
  config.rollouts_per_step = 4;
  config.kl_threshold = 0.05;
  config.critic_epochs = 10;
  config.critic_lr = 0.3;

  grid.cost_limit = kInf;
  envs::TabularTask task_lag(grid), task_plain(grid);
  Rng rng_lag(91), rng_plain(91);

  auto lag_config = config;
  lag_config.algorithm = InnerAlgorithm::TrpoLag;
  const auto lag = safe_rl::adapt_task(
      policy, Vec::Zero(policy.param_count()), 0.0, critic_spec,
      Vec::Zero(critic_spec.param_count()), task_lag, lag_config, rng_lag);

  auto plain_config = config;
  plain_config.algorithm = InnerAlgorithm::Trpo;
  const auto plain = safe_rl::adapt_task(
      policy, Vec::Zero(policy.param_count()), 0.0, critic_spec,
      Vec::Zero(critic_spec.param_count()), task_plain, plain_config,
      rng_plain);

  CHECK(lag.policy == plain.policy);
  CHECK(lag.lambda == 0.0);
}

TEST_CASE("cpo equals trpo when the constraint never activates (zero costs)") {
  envs::GridTaskParams grid = envs::make_grid_params(14);
  grid.horizon = 40;
  grid.hazard_cells.clear();  // cost-free task
  grid.cost_limit = 1.0;
  const Policy policy(tabular_policy_spec());
  const auto critic_spec = tabular_critic_spec();

  InnerLoopConfig config;
  config.adaptation_steps = 5;
  config.rollouts_per_step = 4;
  config.kl_threshold = 0.05;
  config.critic_epochs = 10;
  config.critic_lr = 0.3;

  envs::TabularTask task_cpo(grid), task_trpo(grid);
  Rng rng_cpo(93), rng_trpo(93);

  auto cpo_config = config;
  cpo_config.algorithm = InnerAlgorithm::Cpo;
  const auto cpo = safe_rl::adapt_task(
      policy, Vec::Zero(policy.param_count()), 0.0, critic_spec,
      Vec::Zero(critic_spec.param_count()), task_cpo, cpo_config, rng_cpo);

  auto trpo_config = config;
  trpo_config.algorithm = InnerAlgorithm::Trpo;
  const auto trpo = safe_rl::adapt_task(
      policy, Vec::Zero(policy.param_count()), 0.0, critic_spec,
      Vec::Zero(critic_spec.param_count()), task_trpo, trpo_config, rng_trpo);

  CHECK((cpo.policy - trpo.policy).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("adapt_task improves the exactly evaluated return on a grid task") {
  envs::GridTaskParams grid = envs::make_grid_params(21);
  grid.horizon = 50;
  const auto model = envs::build_grid_cmdp(grid);
  const double gamma = grid.gamma;
  const auto unconstrained =
      oracle::solve_cmdp_lp(model, kInf, gamma);
  REQUIRE(unconstrained.feasible);
  grid.cost_limit = std::max(0.5 * unconstrained.optimal_cost, 0.05);

  const Policy policy(tabular_policy_spec());
  const auto critic_spec = tabular_critic_spec();
  InnerLoopConfig config;
  config.algorithm = InnerAlgorithm::TrpoLag;
  config.adaptation_steps = 15;
  config.rollouts_per_step = 15;
  config.kl_threshold = 0.05;
  config.lambda_lr = 0.5;
  config.critic_epochs = 40;
  config.critic_lr = 0.3;

  envs::TabularTask task(grid);
  Rng rng(99);
  const Vec init = Vec::Zero(policy.param_count());
  const auto result =
      safe_rl::adapt_task(policy, init, 0.0, critic_spec,
                          Vec::Zero(critic_spec.param_count()), task, config,
                          rng);

  const Mat pi0 = extract_policy(policy, init, 25);
  const Mat pi1 = extract_policy(policy, result.policy, 25);
  const auto [j0, c0] = oracle::exact_return_and_cost(model, pi0, gamma);
  const auto [j1, c1] = oracle::exact_return_and_cost(model, pi1, gamma);
  CHECK(j1 > j0);
}
