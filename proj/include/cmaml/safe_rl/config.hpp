#pragma once

namespace cmaml::safe_rl {

enum class InnerAlgorithm { Trpo, TrpoLag, Cpo };

/// Whether the dual update and the CPO constraint compare the discounted
/// cost return or the plain episode cost sum against the limit d.
enum class DualCostMode { Discounted, Undiscounted };

struct InnerLoopConfig {
  InnerAlgorithm algorithm = InnerAlgorithm::TrpoLag;
  double kl_threshold = 0.01;
  double lambda_init = 0.0;
  double lambda_lr = 0.05;
  int adaptation_steps = 1;
  int rollouts_per_step = 4;
  int cg_iters = 10;
  double cg_tol = 1e-10;
  double damping = 0.1;
  double backtrack_coeff = 0.8;
  int backtrack_limit = 10;
  DualCostMode dual_cost_mode = DualCostMode::Discounted;
  double gae_lambda = 0.95;
  bool normalize_advantages = true;
  int critic_epochs = 40;
  double critic_lr = 0.05;

  void validate() const;
};

}  // namespace cmaml::safe_rl
