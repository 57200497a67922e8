#pragma once

#include <cstdint>

namespace cmaml::meta {

enum class BaselineMode { Cmaml, MamlUnconstrained, PretrainSingle, RandomInit };

/// Reading of the meta-policy safety term. PerStep weights each score by the
/// critic's one-step temporal-difference residual; InitialState weights by
/// the full cost return-to-go with the critic as baseline. Both descend the
/// meta-policy's expected cost; PerStep leans hardest on the critic.
enum class EtaTermMode { PerStep, InitialState };

struct OuterConfig {
  int outer_iterations = 25;  // N
  int meta_batch = 8;         // B
  double meta_lr_policy = 0.03;
  double meta_lr_lambda = 0.05;
  double meta_lr_eta = 0.02;
  double lambda_init = 0.0;
  double eta_init = 0.0;
  int meta_rollouts = 8;  // episodes under pi per iteration (critic + eta term)
  int post_rollouts = 4;  // episodes under each adapted policy
  BaselineMode baseline_mode = BaselineMode::Cmaml;
  EtaTermMode eta_term_mode = EtaTermMode::PerStep;
  bool adaptive_lambda = true;  // false freezes lambda at lambda_init
  bool adaptive_eta = true;     // false freezes eta at eta_init (ablation)
  int holdout = 20;  // catalog tail reserved for fine-tuning evaluation
  int critic_epochs = 40;
  double critic_lr = 0.05;

  void validate() const;
};

}  // namespace cmaml::meta
