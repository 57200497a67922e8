#include "cmaml/numkit/distributions.hpp"

#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::numkit {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)
}

double gaussian_log_prob(const GaussianPolicyOut& out, const Vec& action) {
  if (action.size() != out.mean.size() || out.log_std.size() != out.mean.size())
    throw ShapeError("gaussian_log_prob: dimension mismatch");
  const Vec inv_std = (-out.log_std).array().exp();
  const Vec z = (action - out.mean).cwiseProduct(inv_std);
  return -0.5 * z.squaredNorm() - out.log_std.sum() -
         0.5 * kLog2Pi * static_cast<double>(action.size());
}

Vec gaussian_log_prob_grad(const GaussianPolicyOut& out, const Vec& action) {
  const int d = static_cast<int>(out.mean.size());
  const Vec inv_var = (-2.0 * out.log_std).array().exp();
  const Vec diff = action - out.mean;
  Vec grad(2 * d);
  grad.head(d) = diff.cwiseProduct(inv_var);
  grad.tail(d) = (diff.array().square() * inv_var.array() - 1.0).matrix();
  return grad;
}

double gaussian_kl(const GaussianPolicyOut& p, const GaussianPolicyOut& q) {
  if (p.mean.size() != q.mean.size())
    throw ShapeError("gaussian_kl: dimension mismatch");
  const Eigen::ArrayXd var_p = (2.0 * p.log_std).array().exp();
  const Eigen::ArrayXd var_q = (2.0 * q.log_std).array().exp();
  const Eigen::ArrayXd diff = (p.mean - q.mean).array();
  return (q.log_std.array() - p.log_std.array() +
          (var_p + diff.square()) / (2.0 * var_q) - 0.5)
      .sum();
}

Vec gaussian_sample(const GaussianPolicyOut& out, Rng& rng) {
  const int d = static_cast<int>(out.mean.size());
  Vec a(d);
  for (int i = 0; i < d; ++i)
    a[i] = out.mean[i] + std::exp(out.log_std[i]) * rng.normal();
  return a;
}

Vec gaussian_fisher_product(const GaussianPolicyOut& out, const Vec& tangent) {
  const int d = static_cast<int>(out.mean.size());
  if (tangent.size() != 2 * d)
    throw ShapeError("gaussian_fisher_product: tangent length mismatch");
  const Vec inv_var = (-2.0 * out.log_std).array().exp();
  Vec r(2 * d);
  r.head(d) = tangent.head(d).cwiseProduct(inv_var);
  r.tail(d) = 2.0 * tangent.tail(d);
  return r;
}

Vec categorical_probs(const Vec& logits) {
  const double m = logits.maxCoeff();
  Vec p = (logits.array() - m).exp();
  return p / p.sum();
}

double categorical_log_prob(const Vec& logits, int action) {
  if (action < 0 || action >= logits.size())
    throw ShapeError("categorical_log_prob: action index out of range");
  const double m = logits.maxCoeff();
  const double lse = std::log((logits.array() - m).exp().sum()) + m;
  return logits[action] - lse;
}

Vec categorical_log_prob_grad(const Vec& logits, int action) {
  Vec g = -categorical_probs(logits);
  g[action] += 1.0;
  return g;
}

double categorical_kl(const Vec& logits_p, const Vec& logits_q) {
  if (logits_p.size() != logits_q.size())
    throw ShapeError("categorical_kl: dimension mismatch");
  const Vec p = categorical_probs(logits_p);
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    kl += p[i] * (categorical_log_prob(logits_p, i) -
                  categorical_log_prob(logits_q, i));
  }
  return kl;
}

int categorical_sample(const Vec& logits, Rng& rng) {
  const Vec p = categorical_probs(logits);
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

Vec categorical_fisher_product(const Vec& logits, const Vec& tangent) {
  if (tangent.size() != logits.size())
    throw ShapeError("categorical_fisher_product: tangent length mismatch");
  const Vec p = categorical_probs(logits);
  return p.cwiseProduct(tangent) - p * p.dot(tangent);
}

}  // namespace cmaml::numkit
