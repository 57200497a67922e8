#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "cmaml/envs/task.hpp"

namespace cmaml::envs {

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  bool contains(double px, double py) const {
    const double dx = px - x, dy = py - y;
    return dx * dx + dy * dy <= radius * radius;
  }
};

enum class NavDifficulty { Env1Like, Env2Like };

/// Seeded 2D navigation layout: a double-integrator point agent seeks a goal
/// circle while hazard and vase circles charge cost 1 per step of contact.
/// Env1-like layouts carry 9-10 hazards and one vase, Env2-like ten of each.
/// Goals are drawn inside a 140-degree arc ahead of the start.
struct PointNavParams {
  uint64_t task_seed = 0;
  NavDifficulty difficulty = NavDifficulty::Env2Like;
  double arena_half = 3.0;
  Eigen::Vector2d start{0.0, 0.0};
  Eigen::Vector2d goal{0.0, 0.0};
  double goal_radius = 0.3;
  std::vector<Circle> hazards;
  std::vector<Circle> vases;
  double gamma = 0.99;
  double cost_limit = 5.0;
  int horizon = 60;
};

PointNavParams make_point_nav_params(uint64_t task_seed,
                                     NavDifficulty difficulty);

/// Pure kinematics step used by the task and by geometry tests:
/// v' = damping * v + dt * clamp(a), p' = p + dt * v', walls clip position.
struct PointNavStepOut {
  Eigen::Vector2d position;
  Eigen::Vector2d velocity;
  double reward = 0.0;
  double cost = 0.0;
  bool done = false;
};
PointNavStepOut point_nav_step(const PointNavParams& params,
                               const Eigen::Vector2d& position,
                               const Eigen::Vector2d& velocity,
                               const Eigen::Vector2d& action);

constexpr int kNavSectors = 8;       // radial proximity sectors per channel
constexpr double kNavSensorRange = 2.0;
constexpr double kNavDt = 0.2;
constexpr double kNavDamping = 0.8;
constexpr double kNavGoalBonus = 10.0;

class PointNavTask : public CmdpTask {
 public:
  explicit PointNavTask(PointNavParams params);

  TaskKind kind() const override { return TaskKind::PointNav; }
  uint64_t task_id() const override { return params_.task_seed; }
  int obs_dim() const override { return 6 + 2 * kNavSectors; }
  int action_dim() const override { return 2; }
  bool discrete_actions() const override { return false; }
  int action_count() const override { return 0; }
  double gamma() const override { return params_.gamma; }
  double cost_limit() const override { return params_.cost_limit; }
  void set_cost_limit(double d) override { params_.cost_limit = d; }
  int horizon() const override { return params_.horizon; }

  Vec reset(Rng& rng) override;
  StepOutcome step(const Vec& action, Rng& rng) override;

  const PointNavParams& params() const { return params_; }
  Vec observe() const;

 private:
  PointNavParams params_;
  Eigen::Vector2d position_{0.0, 0.0};
  Eigen::Vector2d velocity_{0.0, 0.0};
};

}  // namespace cmaml::envs
