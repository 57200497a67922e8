#pragma once

#include <Eigen/Core>

#include "cmaml/envs/tabular.hpp"

namespace cmaml::oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using envs::TabularCmdp;

/// Constrained optimum from the occupancy-measure linear program.
struct ExactSolution {
  bool feasible = false;
  double optimal_return = 0.0;
  double optimal_cost = 0.0;
  Mat occupancy;  // S x A, sums to 1/(1-gamma)
  Mat policy;     // S x A action distributions (uniform on unvisited states)
};

/// Exact policy evaluation: values, cost-values, advantages and the
/// discounted state occupancy (unnormalized, sums to 1/(1-gamma)).
struct ExactValues {
  Vec v, v_c;
  Mat q, q_c, a, a_c;
  Vec occupancy;
};

/// Solves max_x sum r*x subject to occupancy flow conservation,
/// sum c*x <= d, x >= 0; d may be +infinity for the unconstrained optimum.
ExactSolution solve_cmdp_lp(const TabularCmdp& model, double d, double gamma);

/// Policy rows must be distributions over actions. gamma must be < 1.
ExactValues exact_policy_eval(const TabularCmdp& model, const Mat& policy,
                              double gamma);

Mat softmax_policy(const Mat& logits);

/// Analytic gradient of J - lambda * J_C with respect to softmax logits,
/// via exact occupancy and advantages.
Mat exact_policy_gradient(const TabularCmdp& model, const Mat& logits,
                          double gamma, double lambda);

/// J(policy) and J_C(policy) as initial-distribution-weighted values.
std::pair<double, double> exact_return_and_cost(const TabularCmdp& model,
                                                const Mat& policy,
                                                double gamma);

/// Unconstrained optimum via value iteration (independent of the LP path).
double value_iteration_optimal_return(const TabularCmdp& model, double gamma,
                                      int iters = 10000, double tol = 1e-12);

}  // namespace cmaml::oracle
