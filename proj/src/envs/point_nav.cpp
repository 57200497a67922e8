#include "cmaml/envs/point_nav.hpp"

#include <algorithm>
#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::envs {

namespace {

constexpr double kHazardRadius = 0.35;
constexpr double kVaseRadius = 0.25;
constexpr double kStartClearance = 0.45;
constexpr double kDegToRad = M_PI / 180.0;

Circle sample_obstacle(Rng& rng, const PointNavParams& params, double radius) {
  const double lim = params.arena_half - radius;
  for (;;) {
    Circle c{rng.uniform(-lim, lim), rng.uniform(-lim, lim), radius};
    const double dsx = c.x - params.start.x(), dsy = c.y - params.start.y();
    if (std::sqrt(dsx * dsx + dsy * dsy) < c.radius + kStartClearance) continue;
    return c;
  }
}

}  // namespace

PointNavParams make_point_nav_params(uint64_t task_seed,
                                     NavDifficulty difficulty) {
  PointNavParams params;
  params.task_seed = task_seed;
  params.difficulty = difficulty;
  Rng rng(numkit::stream_seed(task_seed, 0x706e617622ULL));

  // agent start varies per task on the left side of the arena
  params.start.x() = rng.uniform(-2.0, -0.8);
  params.start.y() = rng.uniform(-1.0, 1.0);

  // goal inside a 140-degree arc ahead of the start
  const double bearing = rng.uniform(-70.0, 70.0) * kDegToRad;
  const double dist = rng.uniform(2.0, 3.2);
  const double lim = params.arena_half - params.goal_radius;
  params.goal.x() =
      std::clamp(params.start.x() + dist * std::cos(bearing), -lim, lim);
  params.goal.y() =
      std::clamp(params.start.y() + dist * std::sin(bearing), -lim, lim);

  const int n_hazards =
      (difficulty == NavDifficulty::Env1Like) ? 9 + rng.uniform_int(2) : 10;
  const int n_vases = (difficulty == NavDifficulty::Env1Like) ? 1 : 10;

  // resample any obstacle whose circle covers the goal center
  for (int i = 0; i < n_hazards; ++i) {
    Circle c;
    do {
      c = sample_obstacle(rng, params, kHazardRadius);
    } while (c.contains(params.goal.x(), params.goal.y()));
    params.hazards.push_back(c);
  }
  for (int i = 0; i < n_vases; ++i) {
    Circle c;
    do {
      c = sample_obstacle(rng, params, kVaseRadius);
    } while (c.contains(params.goal.x(), params.goal.y()));
    params.vases.push_back(c);
  }
  return params;
}

PointNavStepOut point_nav_step(const PointNavParams& params,
                               const Eigen::Vector2d& position,
                               const Eigen::Vector2d& velocity,
                               const Eigen::Vector2d& action) {
  PointNavStepOut out;
  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  out.velocity = kNavDamping * velocity + kNavDt * a;
  out.position = position + kNavDt * out.velocity;
  for (int i = 0; i < 2; ++i) {
    if (out.position[i] > params.arena_half) {
      out.position[i] = params.arena_half;
      out.velocity[i] = 0.0;
    } else if (out.position[i] < -params.arena_half) {
      out.position[i] = -params.arena_half;
      out.velocity[i] = 0.0;
    }
  }

  const double prev_dist = (params.goal - position).norm();
  const double new_dist = (params.goal - out.position).norm();
  out.reward = prev_dist - new_dist;

  for (const auto& c : params.hazards)
    if (c.contains(out.position.x(), out.position.y())) {
      out.cost = 1.0;
      break;
    }
  if (out.cost == 0.0)
    for (const auto& c : params.vases)
      if (c.contains(out.position.x(), out.position.y())) {
        out.cost = 1.0;
        break;
      }

  if (new_dist <= params.goal_radius) {
    out.done = true;
    out.reward += kNavGoalBonus;
  }
  return out;
}

PointNavTask::PointNavTask(PointNavParams params) : params_(std::move(params)) {
  if (params_.horizon < 1) throw ShapeError("PointNavTask: horizon must be >= 1");
}

Vec PointNavTask::observe() const {
  Vec obs = Vec::Zero(obs_dim());
  const double ps = 1.0 / params_.arena_half;
  obs[0] = position_.x() * ps;
  obs[1] = position_.y() * ps;
  obs[2] = velocity_.x();
  obs[3] = velocity_.y();
  obs[4] = (params_.goal.x() - position_.x()) * ps;
  obs[5] = (params_.goal.y() - position_.y()) * ps;

  auto fill_sectors = [&](const std::vector<Circle>& circles, int offset) {
    for (const auto& c : circles) {
      const double dx = c.x - position_.x();
      const double dy = c.y - position_.y();
      const double edge_dist =
          std::max(0.0, std::sqrt(dx * dx + dy * dy) - c.radius);
      if (edge_dist >= kNavSensorRange) continue;
      double angle = std::atan2(dy, dx);
      if (angle < 0.0) angle += 2.0 * M_PI;
      int sector = static_cast<int>(angle / (2.0 * M_PI / kNavSectors));
      sector = std::min(sector, kNavSectors - 1);
      const double reading = 1.0 - edge_dist / kNavSensorRange;
      obs[offset + sector] = std::max(obs[offset + sector], reading);
    }
  };
  fill_sectors(params_.hazards, 6);
  fill_sectors(params_.vases, 6 + kNavSectors);
  return obs;
}

Vec PointNavTask::reset(Rng&) {
  position_ = params_.start;
  velocity_.setZero();
  return observe();
}

StepOutcome PointNavTask::step(const Vec& action, Rng&) {
  if (action.size() != 2) throw ShapeError("PointNavTask: action must be 2D");
  if (!action.allFinite())
    throw NumericError("PointNavTask: non-finite action");
  const auto s = point_nav_step(params_, position_, velocity_,
                                Eigen::Vector2d(action[0], action[1]));
  position_ = s.position;
  velocity_ = s.velocity;
  StepOutcome out;
  out.reward = s.reward;
  out.cost = s.cost;
  out.done = s.done;
  out.obs = observe();
  return out;
}

}  // namespace cmaml::envs
