#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

namespace cmaml::envs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One rollout. Rows of `observations`/`actions` are per-step; `costs` are
/// elementwise >= 0. `truncated` means the horizon cut the episode before
/// the environment terminated.
struct Trajectory {
  Mat observations;  // T x obs_dim
  Mat actions;       // T x action_dim (length-1 rows hold discrete indices)
  Vec rewards;
  Vec costs;
  Vec log_probs;
  std::vector<uint8_t> done;
  Vec final_observation;
  bool truncated = false;

  int length() const { return static_cast<int>(rewards.size()); }
  void validate() const;  // throws ShapeError on inconsistent arrays
};

/// (R, C) = (sum_t gamma^t r_t, sum_t gamma^t c_t).
std::pair<double, double> episode_return_and_cost(const Trajectory& traj,
                                                  double gamma);

/// Undiscounted sums, the quantities reported as "mean episode return/cost".
std::pair<double, double> episode_totals(const Trajectory& traj);

}  // namespace cmaml::envs
