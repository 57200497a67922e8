#include "cmaml/safe_rl/critic.hpp"

#include "cmaml/errors.hpp"

namespace cmaml::safe_rl {

Vec critic_predict(const MlpSpec& spec, const Vec& params, const Mat& states) {
  const int n = static_cast<int>(states.rows());
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = numkit::mlp_forward(spec, params, states.row(i).transpose())[0];
  return out;
}

double critic_loss(const MlpSpec& spec, const Vec& params, const Mat& states,
                   const Vec& targets) {
  const Vec pred = critic_predict(spec, params, states);
  return (pred - targets).squaredNorm() / static_cast<double>(targets.size());
}

Vec fit_critic(const MlpSpec& spec, Vec params, const Mat& states,
               const Vec& targets, int epochs, double lr) {
  const int n = static_cast<int>(states.rows());
  if (targets.size() != n)
    throw ShapeError("fit_critic: states/targets length mismatch");
  if (n == 0) return params;

  Vec best = params;
  double best_loss = critic_loss(spec, params, states, targets);
  numkit::MlpWorkspace ws;
  Vec out_grad(1);
  for (int e = 0; e < epochs; ++e) {
    Vec grad = Vec::Zero(params.size());
    for (int i = 0; i < n; ++i) {
      const Vec obs = states.row(i).transpose();
      const double pred = numkit::mlp_forward(spec, params, obs, &ws)[0];
      out_grad[0] = 2.0 * (pred - targets[i]) / static_cast<double>(n);
      grad += numkit::mlp_backward(spec, params, ws, out_grad);
    }
    params -= lr * grad;
    if (!params.allFinite())
      throw NumericError("fit_critic: non-finite parameters");
    const double loss = critic_loss(spec, params, states, targets);
    if (loss < best_loss) {
      best_loss = loss;
      best = params;
    }
  }
  return best;
}

}  // namespace cmaml::safe_rl
