#include "cmaml/envs/tabular.hpp"

#include <algorithm>
#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::envs {

double TabularCmdp::expected_reward(int s, int a) const {
  double e = 0.0;
  for (int s2 = 0; s2 < state_count; ++s2) e += p(s, a, s2) * r(s, a, s2);
  return e;
}

double TabularCmdp::expected_cost(int s, int a) const {
  double e = 0.0;
  for (int s2 = 0; s2 < state_count; ++s2) e += p(s, a, s2) * c(s, a, s2);
  return e;
}

void TabularCmdp::validate() const {
  if (state_count < 1 || action_count < 1)
    throw ShapeError("TabularCmdp: empty state or action space");
  const size_t n = static_cast<size_t>(state_count) * action_count * state_count;
  if (transition.size() != n || reward.size() != n || cost.size() != n)
    throw ShapeError("TabularCmdp: tensor size mismatch");
  for (int s = 0; s < state_count; ++s) {
    for (int a = 0; a < action_count; ++a) {
      double row = 0.0;
      for (int s2 = 0; s2 < state_count; ++s2) {
        const double v = p(s, a, s2);
        if (v < -1e-12 || v > 1.0 + 1e-12)
          throw ShapeError("TabularCmdp: probability outside [0, 1]");
        if (c(s, a, s2) < 0.0) throw ShapeError("TabularCmdp: negative cost");
        row += v;
      }
      if (std::abs(row - 1.0) > 1e-9)
        throw ShapeError("TabularCmdp: transition row does not sum to 1");
    }
  }
  if (initial_dist.size() != state_count ||
      std::abs(initial_dist.sum() - 1.0) > 1e-9)
    throw ShapeError("TabularCmdp: initial distribution does not sum to 1");
}

GridTaskParams make_grid_params(uint64_t task_seed) {
  GridTaskParams params;
  params.task_seed = task_seed;
  Rng rng(numkit::stream_seed(task_seed, 0x6772696422ULL));

  const int side = params.side;
  params.start_cell = 0;
  params.goal_cell = side * side - 1;

  // 2..4 hazards in the interior block so that short start->goal paths tend
  // to cross them; the exact binding cost limit is set per experiment.
  const int n_hazards = 2 + rng.uniform_int(3);
  std::vector<int> interior;
  for (int row = 1; row < side - 1; ++row)
    for (int col = 1; col < side - 1; ++col) interior.push_back(row * side + col);
  for (int k = 0; k < n_hazards; ++k) {
    const int pick = rng.uniform_int(static_cast<int>(interior.size()));
    params.hazard_cells.push_back(interior[pick]);
    interior.erase(interior.begin() + pick);
  }
  std::sort(params.hazard_cells.begin(), params.hazard_cells.end());
  return params;
}

TabularCmdp build_grid_cmdp(const GridTaskParams& params) {
  const int side = params.side;
  const int states = side * side;
  const int actions = 4;  // up, right, down, left
  TabularCmdp model;
  model.state_count = states;
  model.action_count = actions;
  const size_t n = static_cast<size_t>(states) * actions * states;
  model.transition.assign(n, 0.0);
  model.reward.assign(n, 0.0);
  model.cost.assign(n, 0.0);
  model.initial_dist = Vec::Zero(states);
  model.initial_dist[params.start_cell] = 1.0;

  const int drow[4] = {-1, 0, 1, 0};
  const int dcol[4] = {0, 1, 0, -1};
  auto move = [&](int s, int a) {
    const int row = s / side, col = s % side;
    const int nr = std::clamp(row + drow[a], 0, side - 1);
    const int nc = std::clamp(col + dcol[a], 0, side - 1);
    return nr * side + nc;
  };
  auto is_hazard = [&](int s) {
    return std::binary_search(params.hazard_cells.begin(),
                              params.hazard_cells.end(), s);
  };

  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) {
      if (s == params.goal_cell) {
        model.transition[model.idx(s, a, s)] = 1.0;  // absorbing, free
        continue;
      }
      // intended direction plus sideways slips
      const int perp1 = (a + 1) % 4, perp2 = (a + 3) % 4;
      const double p_main = 1.0 - params.slip;
      const double p_slip = params.slip / 2.0;
      model.transition[model.idx(s, a, move(s, a))] += p_main;
      model.transition[model.idx(s, a, move(s, perp1))] += p_slip;
      model.transition[model.idx(s, a, move(s, perp2))] += p_slip;
      for (int s2 = 0; s2 < states; ++s2) {
        if (model.p(s, a, s2) == 0.0) continue;
        if (s2 == params.goal_cell) model.reward[model.idx(s, a, s2)] = 1.0;
        if (is_hazard(s2)) model.cost[model.idx(s, a, s2)] = 1.0;
      }
    }
  }
  model.validate();
  return model;
}

TabularTask::TabularTask(GridTaskParams params)
    : model_(build_grid_cmdp(params)),
      grid_params_(std::move(params)),
      terminal_states_{grid_params_.goal_cell},
      task_id_(grid_params_.task_seed),
      gamma_(grid_params_.gamma),
      cost_limit_(grid_params_.cost_limit),
      horizon_(grid_params_.horizon) {
  if (horizon_ < 1) throw ShapeError("TabularTask: horizon must be >= 1");
}

TabularTask::TabularTask(TabularCmdp model, uint64_t task_id, double gamma,
                         double cost_limit, int horizon,
                         std::vector<int> terminal_states)
    : model_(std::move(model)),
      terminal_states_(std::move(terminal_states)),
      task_id_(task_id),
      gamma_(gamma),
      cost_limit_(cost_limit),
      horizon_(horizon) {
  model_.validate();
  std::sort(terminal_states_.begin(), terminal_states_.end());
  if (horizon_ < 1) throw ShapeError("TabularTask: horizon must be >= 1");
}

Vec TabularTask::one_hot(int s) const {
  Vec v = Vec::Zero(model_.state_count);
  v[s] = 1.0;
  return v;
}

Vec TabularTask::reset(Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  state_ = model_.state_count - 1;
  for (int s = 0; s < model_.state_count; ++s) {
    acc += model_.initial_dist[s];
    if (u < acc) {
      state_ = s;
      break;
    }
  }
  return one_hot(state_);
}

StepOutcome TabularTask::step(const Vec& action, Rng& rng) {
  const int a = static_cast<int>(action[0]);
  if (a < 0 || a >= model_.action_count)
    throw ShapeError("TabularTask: action index out of range");
  const double u = rng.uniform();
  double acc = 0.0;
  int next = model_.state_count - 1;
  for (int s2 = 0; s2 < model_.state_count; ++s2) {
    acc += model_.p(state_, a, s2);
    if (u < acc) {
      next = s2;
      break;
    }
  }
  StepOutcome out;
  out.reward = model_.r(state_, a, next);
  out.cost = model_.c(state_, a, next);
  out.done = std::binary_search(terminal_states_.begin(),
                                terminal_states_.end(), next);
  state_ = next;
  out.obs = one_hot(state_);
  return out;
}

}  // namespace cmaml::envs
