#pragma once

#include <Eigen/Core>

namespace cmaml::oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
};

/// Two-phase dense revised-tableau simplex with Bland's rule, for
/// min c'x subject to Ax = b, x >= 0. Requires b >= 0 (negate rows first).
/// Intended for the small occupancy-measure programs in this project.
LpSolution solve_lp(const Mat& a, const Vec& b, const Vec& c);

}  // namespace cmaml::oracle
