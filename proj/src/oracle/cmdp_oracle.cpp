#include "cmaml/oracle/cmdp_oracle.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "cmaml/errors.hpp"
#include "cmaml/oracle/simplex.hpp"

namespace cmaml::oracle {

ExactSolution solve_cmdp_lp(const TabularCmdp& model, double d, double gamma) {
  model.validate();
  if (gamma < 0.0 || gamma >= 1.0)
    throw ShapeError("solve_cmdp_lp: gamma must lie in [0, 1)");
  if (d < 0.0) throw ShapeError("solve_cmdp_lp: cost limit must be >= 0");
  const int s_count = model.state_count;
  const int a_count = model.action_count;
  const int n_xa = s_count * a_count;
  const bool constrained = std::isfinite(d);
  const int n = n_xa + (constrained ? 1 : 0);  // occupancies (+ cost slack)
  const int m = s_count + (constrained ? 1 : 0);

  Mat a = Mat::Zero(m, n);
  Vec b = Vec::Zero(m);
  Vec c = Vec::Zero(n);

  // flow conservation: sum_a x(s,a) - gamma * sum_{s',a'} P(s',a',s) x(s',a') = mu(s)
  for (int s = 0; s < s_count; ++s) {
    for (int aa = 0; aa < a_count; ++aa) a(s, s * a_count + aa) += 1.0;
    for (int s2 = 0; s2 < s_count; ++s2)
      for (int aa = 0; aa < a_count; ++aa)
        a(s, s2 * a_count + aa) -= gamma * model.p(s2, aa, s);
    b[s] = model.initial_dist[s];
  }
  for (int s = 0; s < s_count; ++s)
    for (int aa = 0; aa < a_count; ++aa) {
      c[s * a_count + aa] = -model.expected_reward(s, aa);  // maximize
      if (constrained) a(s_count, s * a_count + aa) = model.expected_cost(s, aa);
    }
  if (constrained) {
    a(s_count, n_xa) = 1.0;  // slack
    b[s_count] = d;
  }

  const LpSolution lp = solve_lp(a, b, c);
  ExactSolution sol;
  if (lp.status != LpStatus::Optimal) return sol;  // infeasible result

  sol.feasible = true;
  sol.occupancy = Mat::Zero(s_count, a_count);
  for (int s = 0; s < s_count; ++s)
    for (int aa = 0; aa < a_count; ++aa)
      sol.occupancy(s, aa) = lp.x[s * a_count + aa];
  sol.optimal_return = -lp.objective;
  sol.optimal_cost = 0.0;
  for (int s = 0; s < s_count; ++s)
    for (int aa = 0; aa < a_count; ++aa)
      sol.optimal_cost += sol.occupancy(s, aa) * model.expected_cost(s, aa);

  sol.policy = Mat::Zero(s_count, a_count);
  for (int s = 0; s < s_count; ++s) {
    const double total = sol.occupancy.row(s).sum();
    if (total > 1e-12) {
      sol.policy.row(s) = sol.occupancy.row(s) / total;
    } else {
      sol.policy.row(s).setConstant(1.0 / a_count);  // unreachable state
    }
  }
  return sol;
}

ExactValues exact_policy_eval(const TabularCmdp& model, const Mat& policy,
                              double gamma) {
  model.validate();
  if (gamma < 0.0 || gamma >= 1.0)
    throw ShapeError("exact_policy_eval: gamma must lie in [0, 1)");
  const int s_count = model.state_count;
  const int a_count = model.action_count;
  if (policy.rows() != s_count || policy.cols() != a_count)
    throw ShapeError("exact_policy_eval: policy shape mismatch");

  Mat p_pi = Mat::Zero(s_count, s_count);
  Vec r_pi = Vec::Zero(s_count), c_pi = Vec::Zero(s_count);
  for (int s = 0; s < s_count; ++s)
    for (int aa = 0; aa < a_count; ++aa) {
      const double w = policy(s, aa);
      if (w == 0.0) continue;
      r_pi[s] += w * model.expected_reward(s, aa);
      c_pi[s] += w * model.expected_cost(s, aa);
      for (int s2 = 0; s2 < s_count; ++s2) p_pi(s, s2) += w * model.p(s, aa, s2);
    }

  const Mat sys = Mat::Identity(s_count, s_count) - gamma * p_pi;
  Eigen::PartialPivLU<Mat> lu(sys);
  ExactValues values;
  values.v = lu.solve(r_pi);
  values.v_c = lu.solve(c_pi);
  values.occupancy =
      sys.transpose().partialPivLu().solve(model.initial_dist);

  values.q.resize(s_count, a_count);
  values.q_c.resize(s_count, a_count);
  for (int s = 0; s < s_count; ++s)
    for (int aa = 0; aa < a_count; ++aa) {
      double q = model.expected_reward(s, aa);
      double qc = model.expected_cost(s, aa);
      for (int s2 = 0; s2 < s_count; ++s2) {
        q += gamma * model.p(s, aa, s2) * values.v[s2];
        qc += gamma * model.p(s, aa, s2) * values.v_c[s2];
      }
      values.q(s, aa) = q;
      values.q_c(s, aa) = qc;
    }
  values.a = values.q.colwise() - values.v;
  values.a_c = values.q_c.colwise() - values.v_c;
  return values;
}

Mat softmax_policy(const Mat& logits) {
  Mat policy(logits.rows(), logits.cols());
  for (int s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(s).array() - m).exp();
    policy.row(s) = e / e.sum();
  }
  return policy;
}

Mat exact_policy_gradient(const TabularCmdp& model, const Mat& logits,
                          double gamma, double lambda) {
  const Mat policy = softmax_policy(logits);
  const ExactValues values = exact_policy_eval(model, policy, gamma);
  Mat grad(logits.rows(), logits.cols());
  for (int s = 0; s < logits.rows(); ++s)
    for (int aa = 0; aa < logits.cols(); ++aa)
      grad(s, aa) = values.occupancy[s] * policy(s, aa) *
                    (values.a(s, aa) - lambda * values.a_c(s, aa));
  return grad;
}

std::pair<double, double> exact_return_and_cost(const TabularCmdp& model,
                                                const Mat& policy,
                                                double gamma) {
  const ExactValues values = exact_policy_eval(model, policy, gamma);
  return {model.initial_dist.dot(values.v), model.initial_dist.dot(values.v_c)};
}

double value_iteration_optimal_return(const TabularCmdp& model, double gamma,
                                      int iters, double tol) {
  model.validate();
  const int s_count = model.state_count;
  const int a_count = model.action_count;
  Vec v = Vec::Zero(s_count);
  for (int k = 0; k < iters; ++k) {
    Vec next(s_count);
    for (int s = 0; s < s_count; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int aa = 0; aa < a_count; ++aa) {
        double q = model.expected_reward(s, aa);
        for (int s2 = 0; s2 < s_count; ++s2)
          q += gamma * model.p(s, aa, s2) * v[s2];
        best = std::max(best, q);
      }
      next[s] = best;
    }
    const double diff = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (diff < tol) break;
  }
  return model.initial_dist.dot(v);
}

}  // namespace cmaml::oracle
