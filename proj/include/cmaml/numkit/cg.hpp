#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace cmaml::numkit {

using Vec = Eigen::VectorXd;

struct CgResult {
  Vec x;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // ||r|| after each iteration
};

/// Conjugate gradient for symmetric positive-definite operators. Stops when
/// ||Ax - b|| <= tol * ||b|| or after `max_iters` iterations. Throws
/// NumericError on non-finite intermediates.
CgResult conjugate_gradient(const std::function<Vec(const Vec&)>& matvec,
                            const Vec& b, int max_iters, double tol);

}  // namespace cmaml::numkit
