#include "cmaml/safe_rl/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmaml/errors.hpp"
#include "cmaml/numkit/cg.hpp"

namespace cmaml::safe_rl {

namespace {

constexpr double kTinyGradient = 1e-10;
constexpr double kDegenerateCostGradient = 1e-8;

double weighted_surrogate(const Policy& policy, const Vec& params,
                          const UpdateBatch& batch, const Vec& values,
                          const Vec& weights) {
  double acc = 0.0;
  for (int i = 0; i < batch.obs.rows(); ++i) {
    const double lp = policy.log_prob(params, batch.obs.row(i).transpose(),
                                      batch.actions.row(i).transpose());
    acc += weights[i] * std::exp(lp - batch.old_log_probs[i]) * values[i];
  }
  return acc;
}

struct NaturalStep {
  bool ok = false;
  Vec direction;  // full step honoring the KL budget
  std::string note;
};

NaturalStep natural_gradient_step(const Policy& policy, const Vec& params,
                                  const UpdateBatch& batch, const Vec& grad,
                                  const InnerLoopConfig& config) {
  NaturalStep out;
  auto fvp = [&](const Vec& v) {
    return policy.fisher_vector_product(params, batch.obs, v, config.damping);
  };
  const auto cg =
      numkit::conjugate_gradient(fvp, grad, config.cg_iters, config.cg_tol);
  const double shs = cg.x.dot(fvp(cg.x));
  if (shs <= 0.0 || !std::isfinite(shs)) {
    out.note = "non-positive curvature";
    return out;
  }
  out.ok = true;
  out.direction = std::sqrt(2.0 * config.kl_threshold / shs) * cg.x;
  return out;
}

}  // namespace

void InnerLoopConfig::validate() const {
  if (kl_threshold <= 0.0) throw ConfigError("inner: kl_threshold must be > 0");
  if (lambda_init < 0.0) throw ConfigError("inner: lambda_init must be >= 0");
  if (lambda_lr <= 0.0) throw ConfigError("inner: lambda_lr must be > 0");
  if (adaptation_steps < 1) throw ConfigError("inner: adaptation_steps >= 1");
  if (rollouts_per_step < 1) throw ConfigError("inner: rollouts_per_step >= 1");
  if (cg_iters < 1 || damping <= 0.0) throw ConfigError("inner: bad cg config");
  if (backtrack_coeff <= 0.0 || backtrack_coeff >= 1.0 || backtrack_limit < 1)
    throw ConfigError("inner: bad line search config");
  if (gae_lambda < 0.0 || gae_lambda > 1.0)
    throw ConfigError("inner: gae_lambda in [0, 1]");
}

StepReport trpo_step(const Policy& policy, const Vec& params,
                     const UpdateBatch& batch, const Vec& advantages,
                     const InnerLoopConfig& config) {
  StepReport report;
  report.params = params;

  const int n = static_cast<int>(batch.obs.rows());
  const Vec grad =
      policy.score_weighted_sum(params, batch.obs, batch.actions, advantages) /
      static_cast<double>(n);
  if (!grad.allFinite()) throw NumericError("trpo_step: non-finite gradient");
  if (grad.norm() < kTinyGradient) {
    report.note = "zero gradient";
    return report;
  }

  const auto step = natural_gradient_step(policy, params, batch, grad, config);
  if (!step.ok) {
    report.note = step.note;
    return report;
  }

  const double surr_before = policy.surrogate(
      params, batch.obs, batch.actions, batch.old_log_probs, advantages);
  double scale = 1.0;
  for (int k = 0; k < config.backtrack_limit; ++k, scale *= config.backtrack_coeff) {
    const Vec cand = params + scale * step.direction;
    const double kl = policy.mean_kl(cand, params, batch.obs);
    const double surr = policy.surrogate(cand, batch.obs, batch.actions,
                                         batch.old_log_probs, advantages);
    if (kl <= 1.5 * config.kl_threshold && surr - surr_before > 0.0) {
      report.params = cand;
      report.accepted = true;
      report.kl = kl;
      report.surrogate_improvement = surr - surr_before;
      report.backtracks = k;
      return report;
    }
  }
  report.note = "line search exhausted";
  return report;
}

LagStepReport trpo_lag_step(const Policy& policy, const Vec& params,
                            double lambda, const UpdateBatch& batch,
                            double cost_limit, const InnerLoopConfig& config) {
  if (lambda < 0.0) throw ConfigError("trpo_lag_step: lambda must be >= 0");
  const Vec combined =
      (batch.reward_adv - lambda * batch.cost_adv) / (1.0 + lambda);
  LagStepReport report;
  report.step = trpo_step(policy, params, batch, combined, config);
  report.lambda = std::max(
      0.0, lambda + config.lambda_lr * (batch.j_c_estimate - cost_limit));
  return report;
}

CpoDual solve_cpo_dual(double q, double r, double s, double c,
                       double epsilon) {
  CpoDual dual;
  const double eps2 = 2.0 * epsilon;
  if (c > 0.0 && c * c / s - eps2 > 0.0) return dual;  // recovery needed
  dual.feasible = true;

  const double a_coef = std::max(q - r * r / s, 0.0);
  const double b_coef = eps2 - c * c / s;
  constexpr double kLo = 1e-8, kHi = 1e8;
  const double inf = std::numeric_limits<double>::infinity();

  // lambda interval where the cost multiplier nu = (r + lambda c)/s is >= 0
  double a_lo = 0.0, a_hi = inf;
  bool a_valid = true;
  if (c > 0.0) {
    a_lo = std::max(0.0, -r / c);
  } else if (c < 0.0) {
    if (r <= 0.0) a_valid = false;
    else a_hi = r / (-c);
  } else {
    a_valid = r >= 0.0;
  }
  // complementary interval, nu = 0
  double b_lo = 0.0, b_hi = inf;
  bool b_valid = true;
  if (c > 0.0) {
    if (r >= 0.0) b_valid = false;
    else b_hi = -r / c;
  } else if (c < 0.0) {
    b_lo = std::max(0.0, r / (-c));
  } else {
    b_valid = r <= 0.0;
  }

  auto f_a = [&](double lam) {
    return -0.5 * (a_coef / lam + b_coef * lam) + r * c / s;
  };
  auto f_b = [&](double lam) { return -0.5 * (q / lam + eps2 * lam); };

  double best_value = -inf;
  if (a_valid) {
    double lam = (b_coef > 0.0) ? std::sqrt(a_coef / std::max(b_coef, 1e-16))
                                : inf;  // objective increases with lambda
    lam = std::clamp(lam, std::max(a_lo, kLo), std::min(a_hi, kHi));
    const double value = f_a(lam);
    if (value > best_value) {
      best_value = value;
      dual.lambda = lam;
      dual.nu = std::max(0.0, (r + lam * c) / s);
    }
  }
  if (b_valid) {
    double lam = std::sqrt(q / eps2);
    lam = std::clamp(lam, std::max(b_lo, kLo), std::min(b_hi, kHi));
    const double value = f_b(lam);
    if (value > best_value) {
      best_value = value;
      dual.lambda = lam;
      dual.nu = 0.0;
    }
  }
  return dual;
}

StepReport cpo_step(const Policy& policy, const Vec& params,
                    const UpdateBatch& batch, double cost_limit,
                    const InnerLoopConfig& config) {
  StepReport report;
  report.params = params;

  const int n = static_cast<int>(batch.obs.rows());
  const double c = batch.j_c_estimate - cost_limit;
  const Vec cost_weighted = batch.cost_adv.cwiseProduct(batch.cost_surr_weights);
  const Vec b = policy.score_weighted_sum(params, batch.obs, batch.actions,
                                          cost_weighted);
  if (!b.allFinite()) throw NumericError("cpo_step: non-finite cost gradient");

  // degenerate cost gradient with a feasible current cost: plain TRPO
  if (b.norm() < kDegenerateCostGradient && c < 0.0)
    return trpo_step(policy, params, batch, batch.reward_adv, config);

  const Vec g = policy.score_weighted_sum(params, batch.obs, batch.actions,
                                          batch.reward_adv) /
                static_cast<double>(n);
  auto fvp = [&](const Vec& v) {
    return policy.fisher_vector_product(params, batch.obs, v, config.damping);
  };
  const Vec hinv_g =
      numkit::conjugate_gradient(fvp, g, config.cg_iters, config.cg_tol).x;
  const Vec hinv_b =
      numkit::conjugate_gradient(fvp, b, config.cg_iters, config.cg_tol).x;
  const double q = g.dot(hinv_g);
  const double r = g.dot(hinv_b);
  const double s = b.dot(hinv_b);
  if (s <= 0.0 || !std::isfinite(s)) {
    // cost direction carries no curvature signal; treat as degenerate
    if (c < 0.0) return trpo_step(policy, params, batch, batch.reward_adv, config);
    report.note = "degenerate cost curvature while infeasible";
    return report;
  }

  const CpoDual dual = solve_cpo_dual(q, r, s, c, config.kl_threshold);
  Vec direction;
  if (!dual.feasible) {
    // feasibility restoration: steepest cost descent scaled to the trust region
    report.recovery = true;
    direction = -std::sqrt(2.0 * config.kl_threshold / s) * hinv_b;
  } else {
    direction = (hinv_g - dual.nu * hinv_b) / dual.lambda;
  }

  const double surr_before = policy.surrogate(
      params, batch.obs, batch.actions, batch.old_log_probs, batch.reward_adv);
  const double cost_surr_before = weighted_surrogate(
      policy, params, batch, batch.cost_adv, batch.cost_surr_weights);
  const double cost_slack = std::max(-c, 0.0);

  double scale = 1.0;
  for (int k = 0; k < config.backtrack_limit; ++k, scale *= config.backtrack_coeff) {
    const Vec cand = params + scale * direction;
    const double kl = policy.mean_kl(cand, params, batch.obs);
    if (kl > 1.5 * config.kl_threshold) continue;
    const double cost_delta =
        weighted_surrogate(policy, cand, batch, batch.cost_adv,
                           batch.cost_surr_weights) -
        cost_surr_before;
    if (report.recovery) {
      if (cost_delta < 0.0) {
        report.params = cand;
        report.accepted = true;
        report.kl = kl;
        report.surrogate_improvement =
            policy.surrogate(cand, batch.obs, batch.actions,
                             batch.old_log_probs, batch.reward_adv) -
            surr_before;
        report.backtracks = k;
        return report;
      }
      continue;
    }
    const double surr = policy.surrogate(cand, batch.obs, batch.actions,
                                         batch.old_log_probs, batch.reward_adv);
    if (surr - surr_before > 0.0 && cost_delta <= cost_slack + 1e-10) {
      report.params = cand;
      report.accepted = true;
      report.kl = kl;
      report.surrogate_improvement = surr - surr_before;
      report.backtracks = k;
      return report;
    }
  }
  report.note = "line search exhausted";
  return report;
}

}  // namespace cmaml::safe_rl
