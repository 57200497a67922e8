#pragma once

#include <Eigen/Core>

#include "cmaml/numkit/mlp.hpp"

namespace cmaml::safe_rl {

using numkit::Mat;
using numkit::MlpSpec;
using numkit::Vec;

Vec critic_predict(const MlpSpec& spec, const Vec& params, const Mat& states);

double critic_loss(const MlpSpec& spec, const Vec& params, const Mat& states,
                   const Vec& targets);

/// Full-batch gradient-descent MSE regression. Returns the best parameters
/// seen, so the training-batch loss never exceeds the initial loss.
Vec fit_critic(const MlpSpec& spec, Vec params, const Mat& states,
               const Vec& targets, int epochs, double lr);

}  // namespace cmaml::safe_rl
