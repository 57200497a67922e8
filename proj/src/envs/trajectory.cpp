#include "cmaml/envs/trajectory.hpp"

#include "cmaml/errors.hpp"

namespace cmaml::envs {

void Trajectory::validate() const {
  const int t_len = length();
  if (observations.rows() != t_len || actions.rows() != t_len ||
      costs.size() != t_len || log_probs.size() != t_len ||
      static_cast<int>(done.size()) != t_len)
    throw ShapeError("Trajectory: array lengths differ");
  for (int t = 0; t < t_len; ++t)
    if (costs[t] < 0.0) throw ShapeError("Trajectory: negative cost");
}

std::pair<double, double> episode_return_and_cost(const Trajectory& traj,
                                                  double gamma) {
  double r = 0.0, c = 0.0, g = 1.0;
  for (int t = 0; t < traj.length(); ++t) {
    r += g * traj.rewards[t];
    c += g * traj.costs[t];
    g *= gamma;
  }
  return {r, c};
}

std::pair<double, double> episode_totals(const Trajectory& traj) {
  return {traj.rewards.sum(), traj.costs.sum()};
}

}  // namespace cmaml::envs
