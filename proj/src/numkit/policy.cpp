#include "cmaml/numkit/policy.hpp"

#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::numkit {

namespace {

GaussianPolicyOut split_gaussian(const Vec& dist, int dim) {
  return GaussianPolicyOut{dist.head(dim), dist.tail(dim)};
}

}  // namespace

Policy::Policy(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.head == OutputHead::ScalarValue)
    throw ShapeError("Policy: scalar_value head is not a policy");
}

Vec Policy::dist_params(const Vec& params, const Vec& obs) const {
  return mlp_forward(spec_, params, obs);
}

Vec Policy::sample_action(const Vec& params, const Vec& obs, Rng& rng,
                          double* log_prob) const {
  const Vec dist = dist_params(params, obs);
  if (discrete()) {
    const int a = categorical_sample(dist, rng);
    if (log_prob) *log_prob = categorical_log_prob(dist, a);
    Vec av(1);
    av[0] = static_cast<double>(a);
    return av;
  }
  const auto g = split_gaussian(dist, spec_.output_dim());
  Vec a = gaussian_sample(g, rng);
  if (log_prob) *log_prob = gaussian_log_prob(g, a);
  return a;
}

double Policy::log_prob(const Vec& params, const Vec& obs,
                        const Vec& action) const {
  const Vec dist = dist_params(params, obs);
  if (discrete())
    return categorical_log_prob(dist, static_cast<int>(action[0]));
  return gaussian_log_prob(split_gaussian(dist, spec_.output_dim()), action);
}

Vec Policy::score_weighted_sum(const Vec& params, const Mat& obs,
                               const Mat& actions, const Vec& weights) const {
  const int n = static_cast<int>(obs.rows());
  if (actions.rows() != n || weights.size() != n)
    throw ShapeError("score_weighted_sum: batch size mismatch");
  Vec grad = Vec::Zero(params.size());
  MlpWorkspace ws;
  for (int i = 0; i < n; ++i) {
    const Vec dist = mlp_forward(spec_, params, obs.row(i).transpose(), &ws);
    Vec dlogp;
    if (discrete()) {
      dlogp = categorical_log_prob_grad(dist, static_cast<int>(actions(i, 0)));
    } else {
      dlogp = gaussian_log_prob_grad(split_gaussian(dist, spec_.output_dim()),
                                     actions.row(i).transpose());
    }
    grad += mlp_backward(spec_, params, ws, (weights[i] * dlogp).eval());
  }
  return grad;
}

double Policy::surrogate(const Vec& params, const Mat& obs, const Mat& actions,
                         const Vec& old_log_probs, const Vec& adv) const {
  const int n = static_cast<int>(obs.rows());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lp =
        log_prob(params, obs.row(i).transpose(), actions.row(i).transpose());
    acc += std::exp(lp - old_log_probs[i]) * adv[i];
  }
  return acc / static_cast<double>(n);
}

double Policy::mean_kl(const Vec& params_new, const Vec& params_old,
                       const Mat& obs) const {
  const int n = static_cast<int>(obs.rows());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec obs_i = obs.row(i).transpose();
    const Vec dn = dist_params(params_new, obs_i);
    const Vec dp = dist_params(params_old, obs_i);
    if (discrete()) {
      acc += categorical_kl(dn, dp);
    } else {
      const int dim = spec_.output_dim();
      acc += gaussian_kl(split_gaussian(dn, dim), split_gaussian(dp, dim));
    }
  }
  return acc / static_cast<double>(n);
}

Vec Policy::fisher_vector_product(const Vec& params, const Mat& obs,
                                  const Vec& v, double damping) const {
  if (damping <= 0.0)
    throw NumericError("fisher_vector_product: damping must be > 0");
  const int n = static_cast<int>(obs.rows());
  Vec result = Vec::Zero(params.size());
  MlpWorkspace ws;
  for (int i = 0; i < n; ++i) {
    const Vec dist = mlp_forward(spec_, params, obs.row(i).transpose(), &ws);
    const Vec tangent = mlp_jvp(spec_, params, ws, v);
    Vec fisher_t;
    if (discrete()) {
      fisher_t = categorical_fisher_product(dist, tangent);
    } else {
      fisher_t = gaussian_fisher_product(
          split_gaussian(dist, spec_.output_dim()), tangent);
    }
    result += mlp_backward(spec_, params, ws, fisher_t);
  }
  result /= static_cast<double>(n);
  result += damping * v;
  if (!result.allFinite())
    throw NumericError("fisher_vector_product: non-finite result");
  return result;
}

}  // namespace cmaml::numkit
