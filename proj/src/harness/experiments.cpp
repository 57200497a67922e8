#include "cmaml/harness/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cmaml/errors.hpp"
#include "cmaml/harness/plot.hpp"
#include "cmaml/harness/sha1.hpp"
#include "cmaml/meta/fine_tune.hpp"
#include "cmaml/oracle/cmdp_oracle.hpp"

namespace cmaml::harness {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kFinetuneTag = 0x66696e65ULL;
constexpr uint64_t kOracleTag = 0x6f7261636cULL;

double elapsed_or_zero(bool enabled,
                       std::chrono::steady_clock::time_point start) {
  if (!enabled) return 0.0;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string prepare_output_dir(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string resolved = cfg.to_kv().to_string();
  const std::string hash = sha1_hex(resolved).substr(0, 8);
  fs::create_directories(cfg.output_dir);
  std::string dir = cfg.output_dir + "/" + cfg.name + "-" + hash;
  int suffix = 1;
  while (fs::exists(dir)) {
    ++suffix;
    dir = cfg.output_dir + "/" + cfg.name + "-" + hash + "-" +
          std::to_string(suffix);
  }
  fs::create_directories(dir);
  std::ofstream(dir + "/config.txt") << resolved;
  envs::write_manifest(cfg.dist, dir + "/tasks.manifest");
  return dir;
}

MetaTrainOutputs run_meta_train(const ExperimentConfig& cfg,
                                const std::string& dir,
                                const std::string& label) {
  cfg.validate();
  MetaTrainOutputs outputs;
  outputs.csv = dir + "/" + label + ".csv";
  MetricsWriter writer(outputs.csv);

  for (uint64_t seed : cfg.seeds) {
    const auto start = std::chrono::steady_clock::now();
    auto setup = cfg.setup_for_seed(seed);
    const auto result = meta::meta_train(setup);

    size_t task_idx = 0;
    for (const auto& it_row : result.history) {
      while (task_idx < result.task_rows.size() &&
             result.task_rows[task_idx].iteration == it_row.iteration) {
        const auto& tr = result.task_rows[task_idx];
        MetricsRow row;
        row.phase = "meta_train";
        row.iteration = tr.iteration;
        row.task_id = std::to_string(tr.task_id);
        row.mean_episode_return = tr.adapted_return;
        row.mean_episode_cost = tr.adapted_cost;
        row.discounted_return = tr.adapted_discounted_return;
        row.discounted_cost = tr.adapted_discounted_cost;
        row.lambda = tr.lambda_p;
        row.kl = tr.mean_kl;
        row.seed = seed;
        writer.append(row);
        ++task_idx;
      }
      MetricsRow agg;
      agg.phase = "meta_train";
      agg.iteration = it_row.iteration;
      agg.task_id = "agg";
      agg.mean_episode_return = it_row.meta_return;
      agg.mean_episode_cost = it_row.meta_cost;
      agg.discounted_return = it_row.meta_discounted_return;
      agg.discounted_cost = it_row.meta_discounted_cost;
      agg.lambda = it_row.lambda;
      agg.eta = it_row.eta;
      agg.kl = it_row.mean_inner_kl;
      agg.wall_clock_s = elapsed_or_zero(cfg.wall_clock, start);
      agg.seed = seed;
      writer.append(agg);
    }

    auto checkpoint = meta::to_checkpoint(setup, result);
    const auto kv = cfg.to_kv();
    for (const auto& key : kv.keys())
      checkpoint.config_echo[key] = kv.get_string(key, "");
    const std::string path =
        dir + "/" + label + "_seed" + std::to_string(seed) + ".ckpt";
    meta::save_checkpoint(checkpoint, path);
    outputs.checkpoints.push_back(path);

    std::ofstream summary(dir + "/" + label + "_seed" + std::to_string(seed) +
                          "_summary.txt");
    summary << "seed = " << seed << "\n"
            << "iterations = " << result.state.outer_iteration << "\n"
            << "meta_lambda = " << result.state.meta_lambda << "\n"
            << "eta = " << result.state.eta << "\n"
            << "env_steps = " << result.env_steps << "\n";
    if (!result.history.empty()) {
      summary << "final_meta_return = " << result.history.back().meta_return
              << "\n"
              << "final_meta_cost = " << result.history.back().meta_cost
              << "\n";
    }
  }
  return outputs;
}

std::string run_finetune(const ExperimentConfig& cfg, const std::string& dir,
                         const std::vector<std::string>& checkpoints,
                         const std::string& label) {
  cfg.validate();
  if (!checkpoints.empty() && checkpoints.size() != cfg.seeds.size())
    throw ConfigError("run_finetune: need one checkpoint per seed");

  const auto policy_spec = meta::default_policy_spec(cfg.dist, cfg.hidden);
  const auto critic_spec = meta::default_critic_spec(cfg.dist, cfg.hidden);
  const numkit::Policy policy(policy_spec);

  safe_rl::InnerLoopConfig inner = cfg.inner;
  if (inner.algorithm == safe_rl::InnerAlgorithm::Trpo)
    inner.algorithm = safe_rl::InnerAlgorithm::TrpoLag;

  const auto catalog = envs::catalog_task_seeds(cfg.dist);
  if (cfg.finetune_tasks > static_cast<int>(catalog.size()))
    throw ConfigError("run_finetune: not enough catalog tasks");
  const std::vector<uint64_t> heldout(catalog.end() - cfg.finetune_tasks,
                                      catalog.end());

  const std::string csv = dir + "/" + label + ".csv";
  MetricsWriter writer(csv);

  for (size_t si = 0; si < cfg.seeds.size(); ++si) {
    const uint64_t seed = cfg.seeds[si];
    const auto start = std::chrono::steady_clock::now();

    meta::PolicyInit init;
    if (checkpoints.empty()) {
      auto setup = cfg.setup_for_seed(seed);
      setup.outer.baseline_mode = meta::BaselineMode::RandomInit;
      const auto random_state = meta::meta_train(setup);
      init.policy = random_state.state.meta_policy;
      init.cost_critic = random_state.state.meta_cost_critic;
      init.lambda = 0.0;
    } else {
      const auto checkpoint = meta::load_checkpoint(checkpoints[si]);
      if (checkpoint.meta_policy.size() != policy.param_count())
        throw ShapeError(
            "run_finetune: checkpoint policy has " +
            std::to_string(checkpoint.meta_policy.size()) +
            " parameters, the configured environment needs " +
            std::to_string(policy.param_count()));
      init = meta::init_from_checkpoint(checkpoint);
    }

    // aggregate accumulators indexed by iteration
    std::vector<MetricsRow> agg(cfg.finetune_steps + 1);
    for (uint64_t task_seed : heldout) {
      auto task = envs::make_task(cfg.dist, task_seed);
      numkit::Rng rng(numkit::stream_seed(seed, kFinetuneTag, task_seed));
      const auto rows = meta::fine_tune(policy, critic_spec, init, *task,
                                        inner, cfg.finetune_steps,
                                        cfg.eval_episodes, rng);
      for (const auto& ft : rows) {
        MetricsRow row;
        row.phase = "fine_tune";
        row.iteration = ft.iteration;
        row.task_id = std::to_string(task_seed);
        row.mean_episode_return = ft.mean_episode_return;
        row.mean_episode_cost = ft.mean_episode_cost;
        row.discounted_return = ft.discounted_return;
        row.discounted_cost = ft.discounted_cost;
        row.lambda = ft.lambda;
        row.kl = ft.kl;
        row.seed = seed;
        writer.append(row);

        auto& acc = agg[ft.iteration];
        acc.iteration = ft.iteration;
        acc.mean_episode_return += ft.mean_episode_return;
        acc.mean_episode_cost += ft.mean_episode_cost;
        acc.discounted_return += ft.discounted_return;
        acc.discounted_cost += ft.discounted_cost;
        acc.lambda += ft.lambda;
        acc.kl += ft.kl;
      }
    }
    const double n_tasks = static_cast<double>(heldout.size());
    for (auto& acc : agg) {
      acc.phase = "fine_tune";
      acc.task_id = "agg";
      acc.mean_episode_return /= n_tasks;
      acc.mean_episode_cost /= n_tasks;
      acc.discounted_return /= n_tasks;
      acc.discounted_cost /= n_tasks;
      acc.lambda /= n_tasks;
      acc.kl /= n_tasks;
      acc.wall_clock_s = elapsed_or_zero(cfg.wall_clock, start);
      acc.seed = seed;
      writer.append(acc);
    }
  }
  return csv;
}

void run_compare(const ExperimentConfig& cfg, const std::string& dir) {
  const meta::BaselineMode modes[] = {
      meta::BaselineMode::Cmaml, meta::BaselineMode::MamlUnconstrained,
      meta::BaselineMode::PretrainSingle, meta::BaselineMode::RandomInit};
  std::vector<std::string> finetune_csvs;
  for (const auto mode : modes) {
    ExperimentConfig variant = cfg;
    variant.outer.baseline_mode = mode;
    const std::string name = baseline_name(mode);
    const auto outputs = run_meta_train(variant, dir, "meta_" + name);
    finetune_csvs.push_back(run_finetune(cfg, dir, outputs.checkpoints,
                                         "finetune_" + name));
  }
  emit_plots(finetune_csvs, dir + "/compare", cfg.dist.cost_limit);
}

void run_ablate_eta(const ExperimentConfig& cfg, const std::string& dir) {
  ExperimentConfig adaptive = cfg;
  adaptive.outer.baseline_mode = meta::BaselineMode::Cmaml;
  adaptive.outer.adaptive_eta = true;

  ExperimentConfig frozen = adaptive;
  frozen.outer.adaptive_eta = false;
  frozen.outer.eta_init = 0.0;

  const auto out_adaptive = run_meta_train(adaptive, dir, "meta_eta_adaptive");
  const auto out_frozen = run_meta_train(frozen, dir, "meta_eta_frozen");
  const auto ft_adaptive =
      run_finetune(cfg, dir, out_adaptive.checkpoints, "finetune_eta_adaptive");
  const auto ft_frozen =
      run_finetune(cfg, dir, out_frozen.checkpoints, "finetune_eta_frozen");
  emit_plots({out_adaptive.csv, out_frozen.csv}, dir + "/ablate_meta",
             cfg.dist.cost_limit);
  emit_plots({ft_adaptive, ft_frozen}, dir + "/ablate_finetune",
             cfg.dist.cost_limit);
}

OracleCheckOutcome oracle_check(safe_rl::InnerAlgorithm algorithm, int n_tasks,
                                int pass_threshold, int adaptation_steps,
                                uint64_t seed, std::ostream* log,
                                double return_fraction, double cost_slack) {
  const double gamma = 0.95;
  safe_rl::InnerLoopConfig inner;
  inner.algorithm = algorithm;
  inner.kl_threshold = 0.05;
  inner.lambda_lr = 0.5;
  inner.adaptation_steps = adaptation_steps;
  inner.rollouts_per_step = 20;
  inner.gae_lambda = 0.95;
  inner.critic_epochs = 60;
  inner.critic_lr = 0.3;
  inner.dual_cost_mode = safe_rl::DualCostMode::Discounted;

  numkit::MlpSpec policy_spec;
  policy_spec.layer_sizes = {25, 4};
  policy_spec.head = numkit::OutputHead::CategoricalPolicy;
  numkit::MlpSpec critic_spec;
  critic_spec.layer_sizes = {25, 1};
  critic_spec.head = numkit::OutputHead::ScalarValue;
  const numkit::Policy policy(policy_spec);

  OracleCheckOutcome outcome;
  std::ostringstream report;
  uint64_t counter = 0;
  while (outcome.tasks_total < n_tasks && counter < 1000) {
    const uint64_t task_seed = numkit::stream_seed(seed, kOracleTag, counter);
    ++counter;
    envs::GridTaskParams grid = envs::make_grid_params(task_seed);
    grid.gamma = gamma;
    const auto model = envs::build_grid_cmdp(grid);

    const auto unconstrained = oracle::solve_cmdp_lp(
        model, std::numeric_limits<double>::infinity(), gamma);
    if (!unconstrained.feasible || unconstrained.optimal_cost < 0.1) continue;
    const double d = 0.5 * unconstrained.optimal_cost;
    const auto constrained = oracle::solve_cmdp_lp(model, d, gamma);
    if (!constrained.feasible || constrained.optimal_return < 0.05) continue;

    ++outcome.tasks_total;
    grid.cost_limit = d;
    envs::TabularTask task(grid);

    numkit::Rng rng(numkit::stream_seed(seed, kOracleTag, counter, 17));
    const numkit::Vec uniform_init = numkit::Vec::Zero(policy.param_count());
    const numkit::Vec zero_critic = numkit::Vec::Zero(critic_spec.param_count());
    const auto adaptation = safe_rl::adapt_task(
        policy, uniform_init, 0.0, critic_spec, zero_critic, task, inner, rng);

    // exact evaluation of the learned policy
    numkit::Mat learned(25, 4);
    for (int s = 0; s < 25; ++s) {
      numkit::Vec one_hot = numkit::Vec::Zero(25);
      one_hot[s] = 1.0;
      learned.row(s) =
          numkit::categorical_probs(policy.dist_params(adaptation.policy, one_hot))
              .transpose();
    }
    const auto [j_dp, c_dp] = oracle::exact_return_and_cost(model, learned, gamma);

    const bool pass = j_dp >= return_fraction * constrained.optimal_return &&
                      c_dp <= d + cost_slack;
    if (pass) ++outcome.tasks_passed;
    report << "task " << outcome.tasks_total << " seed=" << task_seed
           << " d=" << d << " lp_return=" << constrained.optimal_return
           << " learner_return=" << j_dp << " learner_cost=" << c_dp << " "
           << (pass ? "PASS" : "FAIL") << "\n";
  }
  outcome.passed = outcome.tasks_passed >= pass_threshold &&
                   outcome.tasks_total == n_tasks;
  report << "oracle-check: " << outcome.tasks_passed << "/"
         << outcome.tasks_total << " tasks passed (threshold "
         << pass_threshold << ") => "
         << (outcome.passed ? "PASS" : "FAIL") << "\n";
  outcome.report = report.str();
  if (log) (*log) << outcome.report;
  return outcome;
}

}  // namespace cmaml::harness
