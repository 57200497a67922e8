#pragma once

#include <Eigen/Core>

#include "cmaml/numkit/rng.hpp"

namespace cmaml::numkit {

using Vec = Eigen::VectorXd;

/// Diagonal Gaussian over a continuous action space.
struct GaussianPolicyOut {
  Vec mean;
  Vec log_std;
};

double gaussian_log_prob(const GaussianPolicyOut& out, const Vec& action);

/// Gradient of log-prob with respect to the distribution parameters,
/// concatenated as [d_mean, d_log_std].
Vec gaussian_log_prob_grad(const GaussianPolicyOut& out, const Vec& action);

/// KL(p || q), exact closed form, >= 0, zero iff p == q.
double gaussian_kl(const GaussianPolicyOut& p, const GaussianPolicyOut& q);

Vec gaussian_sample(const GaussianPolicyOut& out, Rng& rng);

/// Fisher information of the distribution applied to a parameter tangent
/// [t_mean, t_log_std]: returns [t_mean / sigma^2, 2 * t_log_std].
Vec gaussian_fisher_product(const GaussianPolicyOut& out, const Vec& tangent);

// Categorical over logits (softmax).
Vec categorical_probs(const Vec& logits);
double categorical_log_prob(const Vec& logits, int action);
Vec categorical_log_prob_grad(const Vec& logits, int action);
double categorical_kl(const Vec& logits_p, const Vec& logits_q);
int categorical_sample(const Vec& logits, Rng& rng);
/// Fisher of the categorical in logit coordinates: (diag(p) - p p^T) t.
Vec categorical_fisher_product(const Vec& logits, const Vec& tangent);

}  // namespace cmaml::numkit
