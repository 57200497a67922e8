#pragma once

#include <string>

#include "cmaml/numkit/policy.hpp"
#include "cmaml/safe_rl/batch.hpp"
#include "cmaml/safe_rl/config.hpp"

namespace cmaml::safe_rl {

using numkit::Policy;

struct StepReport {
  Vec params;
  bool accepted = false;
  double kl = 0.0;
  double surrogate_improvement = 0.0;
  int backtracks = 0;
  bool recovery = false;  // CPO feasibility-restoration step
  std::string note;
};

/// One TRPO update on the given advantages: CG natural gradient plus
/// backtracking line search. Steps are accepted only when the surrogate
/// improves and the measured mean KL stays within 1.5x the threshold;
/// otherwise the policy is returned unchanged.
StepReport trpo_step(const Policy& policy, const Vec& params,
                     const UpdateBatch& batch, const Vec& advantages,
                     const InnerLoopConfig& config);

struct LagStepReport {
  StepReport step;
  double lambda = 0.0;
};

/// TRPOLag primal-dual update: primal TRPO step on the combined advantage
/// (A - lambda * A_C) / (1 + lambda), then the projected dual ascent
/// lambda <- max(0, lambda + lr * (J_C - d)).
LagStepReport trpo_lag_step(const Policy& policy, const Vec& params,
                            double lambda, const UpdateBatch& batch,
                            double cost_limit, const InnerLoopConfig& config);

/// CPO update: quadratic trust-region subproblem with a linearized cost
/// constraint, solved through its analytic dual; infeasible starts trigger a
/// pure cost-reduction recovery step. A degenerate cost gradient with a
/// feasible current cost falls back to plain TRPO.
StepReport cpo_step(const Policy& policy, const Vec& params,
                    const UpdateBatch& batch, double cost_limit,
                    const InnerLoopConfig& config);

/// Analytic solution of the CPO dual for given curvature scalars; exposed for
/// verification against brute-force search over the dual variables.
struct CpoDual {
  bool feasible = false;  // false -> recovery step required
  double lambda = 0.0;    // KL multiplier
  double nu = 0.0;        // cost multiplier
};
CpoDual solve_cpo_dual(double q, double r, double s, double c, double epsilon);

}  // namespace cmaml::safe_rl
