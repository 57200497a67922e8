#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace cmaml::numkit {

using Vec = Eigen::VectorXd;

struct GaeResult {
  Vec advantages;
  Vec returns;  // advantages + values; regression targets for the critic
};

/// Generalized advantage estimation over one episode. `signal` is the
/// per-step reward or cost, `values` the critic predictions V(s_t),
/// `bootstrap_value` the prediction at the state after the last step (used
/// only when the final step is not terminal), `done[t]` marks environment
/// termination at step t. With lambda = 1 and zero values the advantages
/// reduce to discounted returns-to-go.
GaeResult gae(const Vec& signal, const Vec& values, double bootstrap_value,
              const std::vector<uint8_t>& done, double gamma, double lambda);

/// In-place shift/scale to sample mean 0, sample std 1 (population std).
/// No-op on vectors with fewer than 2 elements or zero variance.
void normalize_advantages(Vec& adv);

}  // namespace cmaml::numkit
