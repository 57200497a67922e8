#include <CLI11.hpp>
#include <iostream>

#include "cmaml/errors.hpp"
#include "cmaml/harness/experiments.hpp"
#include "cmaml/harness/plot.hpp"

namespace {

using cmaml::harness::ExperimentConfig;
using cmaml::harness::KvConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAcceptance = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions* options) {
  cmd->add_option("--config", options->config_path,
                  "Configuration file (key = value lines)");
  cmd->add_option("--set", options->overrides,
                  "Override a config key, e.g. --set outer.batch=8")
      ->take_all();
}

ExperimentConfig resolve_config(const CommonOptions& options) {
  KvConfig kv;
  if (!options.config_path.empty())
    kv = KvConfig::from_file(options.config_path);
  for (const auto& item : options.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw cmaml::ConfigError("--set expects key=value, got: " + item);
    std::string key = item.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    kv.set(key, item.substr(eq + 1));
  }
  return ExperimentConfig::from_kv(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-MAML: constrained meta-reinforcement learning at desk scale"};
  app.require_subcommand(1);

  CommonOptions train_opts, finetune_opts, compare_opts, ablate_opts;
  std::vector<std::string> finetune_checkpoints;

  auto* cmd_train =
      app.add_subcommand("meta-train", "Run the C-MAML outer loop");
  add_common(cmd_train, &train_opts);

  auto* cmd_finetune = app.add_subcommand(
      "finetune", "Fine-tune held-out tasks from checkpoints (or random)");
  add_common(cmd_finetune, &finetune_opts);
  cmd_finetune->add_option(
      "--checkpoint", finetune_checkpoints,
      "Checkpoint file per seed; omit for random initialization");

  auto* cmd_compare = app.add_subcommand(
      "compare", "Four-way initialization study (cmaml/maml/pretrain/random)");
  add_common(cmd_compare, &compare_opts);

  auto* cmd_ablate = app.add_subcommand(
      "ablate-eta", "Paired meta-training with adaptive vs frozen eta");
  add_common(cmd_ablate, &ablate_opts);

  auto* cmd_oracle = app.add_subcommand(
      "oracle-check", "Tabular oracle-equivalence suite (LP vs learner)");
  std::string oracle_algorithm = "trpo_lag";
  int oracle_tasks = 10, oracle_threshold = 8, oracle_steps = 30;
  uint64_t oracle_seed = 7;
  cmd_oracle->add_option("--algorithm", oracle_algorithm,
                         "trpo_lag or cpo (default trpo_lag)");
  cmd_oracle->add_option("--tasks", oracle_tasks, "Number of grid tasks");
  cmd_oracle->add_option("--threshold", oracle_threshold,
                         "Tasks that must pass");
  cmd_oracle->add_option("--steps", oracle_steps, "Adaptation steps");
  cmd_oracle->add_option("--seed", oracle_seed, "Task suite seed");

  auto* cmd_plot =
      app.add_subcommand("plot", "Render SVG panels from metrics CSVs");
  std::vector<std::string> plot_csvs;
  std::string plot_out = "plots";
  double plot_cost_limit = 5.0;
  cmd_plot->add_option("--csv", plot_csvs, "Metrics CSV (repeatable)")
      ->required();
  cmd_plot->add_option("--out", plot_out, "Output path prefix");
  cmd_plot->add_option("--cost-limit", plot_cost_limit,
                       "Reference line for cost panels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) {
      const auto cfg = resolve_config(train_opts);
      const auto dir = cmaml::harness::prepare_output_dir(cfg);
      const auto outputs = cmaml::harness::run_meta_train(cfg, dir);
      cmaml::harness::emit_plots({outputs.csv}, dir + "/meta",
                                 cfg.dist.cost_limit);
      std::cout << "meta-train: wrote " << outputs.csv << "\n";
      for (const auto& ckpt : outputs.checkpoints)
        std::cout << "checkpoint: " << ckpt << "\n";
    } else if (cmd_finetune->parsed()) {
      const auto cfg = resolve_config(finetune_opts);
      const auto dir = cmaml::harness::prepare_output_dir(cfg);
      const auto csv = cmaml::harness::run_finetune(
          cfg, dir, finetune_checkpoints, "finetune");
      cmaml::harness::emit_plots({csv}, dir + "/finetune",
                                 cfg.dist.cost_limit);
      std::cout << "finetune: wrote " << csv << "\n";
    } else if (cmd_compare->parsed()) {
      const auto cfg = resolve_config(compare_opts);
      const auto dir = cmaml::harness::prepare_output_dir(cfg);
      cmaml::harness::run_compare(cfg, dir);
      std::cout << "compare: outputs in " << dir << "\n";
    } else if (cmd_ablate->parsed()) {
      const auto cfg = resolve_config(ablate_opts);
      const auto dir = cmaml::harness::prepare_output_dir(cfg);
      cmaml::harness::run_ablate_eta(cfg, dir);
      std::cout << "ablate-eta: outputs in " << dir << "\n";
    } else if (cmd_oracle->parsed()) {
      const auto algorithm = cmaml::harness::algorithm_from_name(oracle_algorithm);
      if (algorithm == cmaml::safe_rl::InnerAlgorithm::Trpo)
        throw cmaml::ConfigError("oracle-check: use trpo_lag or cpo");
      const auto outcome = cmaml::harness::oracle_check(
          algorithm, oracle_tasks, oracle_threshold, oracle_steps, oracle_seed,
          &std::cout);
      return outcome.passed ? kExitOk : kExitAcceptance;
    } else if (cmd_plot->parsed()) {
      const auto written =
          cmaml::harness::emit_plots(plot_csvs, plot_out, plot_cost_limit);
      for (const auto& path : written) std::cout << "plot: " << path << "\n";
    }
  } catch (const cmaml::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
