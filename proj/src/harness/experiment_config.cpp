#include "cmaml/harness/experiment_config.hpp"

#include <sstream>

#include "cmaml/errors.hpp"

namespace cmaml::harness {

namespace {

std::string int_list_to_string(const std::vector<int>& values) {
  std::ostringstream out;
  for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

std::string u64_list_to_string(const std::vector<uint64_t>& values) {
  std::ostringstream out;
  for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

}  // namespace

std::string algorithm_name(safe_rl::InnerAlgorithm algorithm) {
  switch (algorithm) {
    case safe_rl::InnerAlgorithm::Trpo: return "trpo";
    case safe_rl::InnerAlgorithm::TrpoLag: return "trpo_lag";
    case safe_rl::InnerAlgorithm::Cpo: return "cpo";
  }
  return "trpo_lag";
}

safe_rl::InnerAlgorithm algorithm_from_name(const std::string& name) {
  if (name == "trpo") return safe_rl::InnerAlgorithm::Trpo;
  if (name == "trpo_lag") return safe_rl::InnerAlgorithm::TrpoLag;
  if (name == "cpo") return safe_rl::InnerAlgorithm::Cpo;
  throw ConfigError("inner.algorithm: unknown value " + name);
}

std::string baseline_name(meta::BaselineMode mode) {
  switch (mode) {
    case meta::BaselineMode::Cmaml: return "cmaml";
    case meta::BaselineMode::MamlUnconstrained: return "maml_unconstrained";
    case meta::BaselineMode::PretrainSingle: return "pretrain_single";
    case meta::BaselineMode::RandomInit: return "random";
  }
  return "cmaml";
}

meta::BaselineMode baseline_from_name(const std::string& name) {
  if (name == "cmaml") return meta::BaselineMode::Cmaml;
  if (name == "maml_unconstrained") return meta::BaselineMode::MamlUnconstrained;
  if (name == "pretrain_single") return meta::BaselineMode::PretrainSingle;
  if (name == "random") return meta::BaselineMode::RandomInit;
  throw ConfigError("outer.baseline_mode: unknown value " + name);
}

ExperimentConfig ExperimentConfig::from_kv(const KvConfig& kv) {
  ExperimentConfig cfg;
  cfg.name = kv.get_string("name", cfg.name);

  cfg.dist.family = envs::family_from_name(
      kv.get_string("env.family", envs::family_name(cfg.dist.family)));
  cfg.dist.difficulty = envs::difficulty_from_name(kv.get_string(
      "env.difficulty", envs::difficulty_name(cfg.dist.difficulty)));
  cfg.dist.master_seed = kv.get_u64("env.master_seed", cfg.dist.master_seed);
  cfg.dist.count = kv.get_int("env.count", cfg.dist.count);
  cfg.dist.gamma = kv.get_double("env.gamma", cfg.dist.gamma);
  cfg.dist.cost_limit = kv.get_double("env.cost_limit", cfg.dist.cost_limit);
  cfg.dist.horizon = kv.get_int("env.horizon", cfg.dist.horizon);

  cfg.hidden = kv.get_int_list("policy.hidden", cfg.hidden);

  auto& inner = cfg.inner;
  inner.algorithm = algorithm_from_name(
      kv.get_string("inner.algorithm", algorithm_name(inner.algorithm)));
  inner.kl_threshold = kv.get_double("inner.kl_threshold", inner.kl_threshold);
  inner.lambda_init = kv.get_double("inner.lambda_init", inner.lambda_init);
  inner.lambda_lr = kv.get_double("inner.lambda_lr", inner.lambda_lr);
  inner.adaptation_steps =
      kv.get_int("inner.adaptation_steps", inner.adaptation_steps);
  inner.rollouts_per_step =
      kv.get_int("inner.rollouts_per_step", inner.rollouts_per_step);
  inner.cg_iters = kv.get_int("inner.cg_iters", inner.cg_iters);
  inner.cg_tol = kv.get_double("inner.cg_tol", inner.cg_tol);
  inner.damping = kv.get_double("inner.damping", inner.damping);
  inner.backtrack_coeff =
      kv.get_double("inner.backtrack_coeff", inner.backtrack_coeff);
  inner.backtrack_limit =
      kv.get_int("inner.backtrack_limit", inner.backtrack_limit);
  const std::string dual_mode = kv.get_string(
      "inner.dual_cost_mode",
      inner.dual_cost_mode == safe_rl::DualCostMode::Discounted ? "discounted"
                                                                : "undiscounted");
  if (dual_mode == "discounted")
    inner.dual_cost_mode = safe_rl::DualCostMode::Discounted;
  else if (dual_mode == "undiscounted")
    inner.dual_cost_mode = safe_rl::DualCostMode::Undiscounted;
  else
    throw ConfigError("inner.dual_cost_mode: unknown value " + dual_mode);
  inner.gae_lambda = kv.get_double("inner.gae_lambda", inner.gae_lambda);
  inner.normalize_advantages =
      kv.get_bool("inner.normalize_advantages", inner.normalize_advantages);
  inner.critic_epochs = kv.get_int("inner.critic_epochs", inner.critic_epochs);
  inner.critic_lr = kv.get_double("inner.critic_lr", inner.critic_lr);

  auto& outer = cfg.outer;
  outer.outer_iterations = kv.get_int("outer.iterations", outer.outer_iterations);
  outer.meta_batch = kv.get_int("outer.batch", outer.meta_batch);
  outer.meta_lr_policy = kv.get_double("outer.lr_policy", outer.meta_lr_policy);
  outer.meta_lr_lambda = kv.get_double("outer.lr_lambda", outer.meta_lr_lambda);
  outer.meta_lr_eta = kv.get_double("outer.lr_eta", outer.meta_lr_eta);
  outer.lambda_init = kv.get_double("outer.lambda_init", outer.lambda_init);
  outer.eta_init = kv.get_double("outer.eta_init", outer.eta_init);
  outer.meta_rollouts = kv.get_int("outer.meta_rollouts", outer.meta_rollouts);
  outer.post_rollouts = kv.get_int("outer.post_rollouts", outer.post_rollouts);
  outer.baseline_mode = baseline_from_name(
      kv.get_string("outer.baseline_mode", baseline_name(outer.baseline_mode)));
  const std::string eta_mode = kv.get_string(
      "outer.eta_term_mode",
      outer.eta_term_mode == meta::EtaTermMode::PerStep ? "per_step"
                                                        : "initial_state");
  if (eta_mode == "per_step")
    outer.eta_term_mode = meta::EtaTermMode::PerStep;
  else if (eta_mode == "initial_state")
    outer.eta_term_mode = meta::EtaTermMode::InitialState;
  else
    throw ConfigError("outer.eta_term_mode: unknown value " + eta_mode);
  outer.adaptive_lambda =
      kv.get_bool("outer.adaptive_lambda", outer.adaptive_lambda);
  outer.adaptive_eta = kv.get_bool("outer.adaptive_eta", outer.adaptive_eta);
  outer.holdout = kv.get_int("outer.holdout", outer.holdout);
  outer.critic_epochs = kv.get_int("outer.critic_epochs", outer.critic_epochs);
  outer.critic_lr = kv.get_double("outer.critic_lr", outer.critic_lr);

  cfg.seeds = kv.get_u64_list("run.seeds", cfg.seeds);
  cfg.finetune_steps = kv.get_int("finetune.steps", cfg.finetune_steps);
  cfg.finetune_tasks = kv.get_int("finetune.tasks", cfg.finetune_tasks);
  cfg.eval_episodes = kv.get_int("finetune.eval_episodes", cfg.eval_episodes);
  cfg.output_dir = kv.get_string("run.output_dir", cfg.output_dir);
  cfg.workers = kv.get_int("run.workers", cfg.workers);
  cfg.wall_clock = kv.get_bool("run.wall_clock", cfg.wall_clock);
  cfg.validate();
  return cfg;
}

KvConfig ExperimentConfig::to_kv() const {
  KvConfig kv;
  kv.set("name", name);
  kv.set("env.family", envs::family_name(dist.family));
  kv.set("env.difficulty", envs::difficulty_name(dist.difficulty));
  kv.set_u64("env.master_seed", dist.master_seed);
  kv.set_int("env.count", dist.count);
  kv.set_double("env.gamma", dist.gamma);
  kv.set_double("env.cost_limit", dist.cost_limit);
  kv.set_int("env.horizon", dist.horizon);
  kv.set("policy.hidden", int_list_to_string(hidden));
  kv.set("inner.algorithm", algorithm_name(inner.algorithm));
  kv.set_double("inner.kl_threshold", inner.kl_threshold);
  kv.set_double("inner.lambda_init", inner.lambda_init);
  kv.set_double("inner.lambda_lr", inner.lambda_lr);
  kv.set_int("inner.adaptation_steps", inner.adaptation_steps);
  kv.set_int("inner.rollouts_per_step", inner.rollouts_per_step);
  kv.set_int("inner.cg_iters", inner.cg_iters);
  kv.set_double("inner.cg_tol", inner.cg_tol);
  kv.set_double("inner.damping", inner.damping);
  kv.set_double("inner.backtrack_coeff", inner.backtrack_coeff);
  kv.set_int("inner.backtrack_limit", inner.backtrack_limit);
  kv.set("inner.dual_cost_mode",
         inner.dual_cost_mode == safe_rl::DualCostMode::Discounted
             ? "discounted"
             : "undiscounted");
  kv.set_double("inner.gae_lambda", inner.gae_lambda);
  kv.set_bool("inner.normalize_advantages", inner.normalize_advantages);
  kv.set_int("inner.critic_epochs", inner.critic_epochs);
  kv.set_double("inner.critic_lr", inner.critic_lr);
  kv.set_int("outer.iterations", outer.outer_iterations);
  kv.set_int("outer.batch", outer.meta_batch);
  kv.set_double("outer.lr_policy", outer.meta_lr_policy);
  kv.set_double("outer.lr_lambda", outer.meta_lr_lambda);
  kv.set_double("outer.lr_eta", outer.meta_lr_eta);
  kv.set_double("outer.lambda_init", outer.lambda_init);
  kv.set_double("outer.eta_init", outer.eta_init);
  kv.set_int("outer.meta_rollouts", outer.meta_rollouts);
  kv.set_int("outer.post_rollouts", outer.post_rollouts);
  kv.set("outer.baseline_mode", baseline_name(outer.baseline_mode));
  kv.set("outer.eta_term_mode",
         outer.eta_term_mode == meta::EtaTermMode::PerStep ? "per_step"
                                                           : "initial_state");
  kv.set_bool("outer.adaptive_lambda", outer.adaptive_lambda);
  kv.set_bool("outer.adaptive_eta", outer.adaptive_eta);
  kv.set_int("outer.holdout", outer.holdout);
  kv.set_int("outer.critic_epochs", outer.critic_epochs);
  kv.set_double("outer.critic_lr", outer.critic_lr);
  kv.set("run.seeds", u64_list_to_string(seeds));
  kv.set_int("finetune.steps", finetune_steps);
  kv.set_int("finetune.tasks", finetune_tasks);
  kv.set_int("finetune.eval_episodes", eval_episodes);
  kv.set("run.output_dir", output_dir);
  kv.set_int("run.workers", workers);
  kv.set_bool("run.wall_clock", wall_clock);
  return kv;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name: must not be empty");
  if (dist.count < 1) throw ConfigError("env.count: must be >= 1");
  if (dist.gamma < 0.0 || dist.gamma >= 1.0)
    throw ConfigError("env.gamma: must lie in [0, 1)");
  if (dist.cost_limit < 0.0) throw ConfigError("env.cost_limit: must be >= 0");
  if (dist.horizon < 1) throw ConfigError("env.horizon: must be >= 1");
  inner.validate();
  outer.validate();
  if (seeds.empty()) throw ConfigError("run.seeds: need at least one seed");
  if (finetune_steps < 0) throw ConfigError("finetune.steps: must be >= 0");
  if (finetune_tasks < 1) throw ConfigError("finetune.tasks: must be >= 1");
  if (eval_episodes < 1)
    throw ConfigError("finetune.eval_episodes: must be >= 1");
  if (workers < 1) throw ConfigError("run.workers: must be >= 1");
  if (finetune_tasks > dist.count)
    throw ConfigError("finetune.tasks: exceeds catalog size");
}

meta::MetaTrainSetup ExperimentConfig::setup_for_seed(uint64_t seed) const {
  meta::MetaTrainSetup setup;
  setup.dist = dist;
  setup.inner = inner;
  setup.outer = outer;
  setup.policy_spec = meta::default_policy_spec(dist, hidden);
  setup.critic_spec = meta::default_critic_spec(dist, hidden);
  setup.seed = seed;
  setup.workers = workers;
  return setup;
}

}  // namespace cmaml::harness
