#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "cmaml/envs/task.hpp"

namespace cmaml::envs {

using Mat = Eigen::MatrixXd;

/// Dense tabular CMDP model: transition tensor M[s,a,s'], reward and cost
/// tables on (s,a,s'), and the initial state distribution.
struct TabularCmdp {
  int state_count = 0;
  int action_count = 0;
  std::vector<double> transition;  // s * A * S + a * S + s'
  std::vector<double> reward;
  std::vector<double> cost;
  Vec initial_dist;

  int idx(int s, int a, int s2) const {
    return (s * action_count + a) * state_count + s2;
  }
  double p(int s, int a, int s2) const { return transition[idx(s, a, s2)]; }
  double r(int s, int a, int s2) const { return reward[idx(s, a, s2)]; }
  double c(int s, int a, int s2) const { return cost[idx(s, a, s2)]; }

  /// E[r | s, a] and E[c | s, a] under the transition kernel.
  double expected_reward(int s, int a) const;
  double expected_cost(int s, int a) const;

  /// Rows of M and the initial distribution must each sum to 1 (1e-9),
  /// probabilities in [0,1], costs >= 0.
  void validate() const;
};

/// Seeded 5x5 grid-hazard layout. Start lower-left, goal upper-right, goal
/// absorbing with entry reward 1, hazard cells charge cost 1 on entry, moves
/// slip sideways with the given probability.
struct GridTaskParams {
  uint64_t task_seed = 0;
  int side = 5;
  double slip = 0.1;
  int start_cell = 0;
  int goal_cell = 24;
  std::vector<int> hazard_cells;  // 2..4 cells
  double gamma = 0.95;
  double cost_limit = 0.25;
  int horizon = 60;
};

/// Deterministic layout from a task seed; hazard count cycles through 2..4.
GridTaskParams make_grid_params(uint64_t task_seed);

TabularCmdp build_grid_cmdp(const GridTaskParams& params);

class TabularTask : public CmdpTask {
 public:
  TabularTask(GridTaskParams params);
  /// Generic model; `terminal_states` end the episode on entry (they should
  /// be absorbing and free in the model so rollouts match exact evaluation).
  TabularTask(TabularCmdp model, uint64_t task_id, double gamma,
              double cost_limit, int horizon,
              std::vector<int> terminal_states = {});

  TaskKind kind() const override { return TaskKind::Tabular; }
  uint64_t task_id() const override { return task_id_; }
  int obs_dim() const override { return model_.state_count; }  // one-hot
  int action_dim() const override { return 1; }
  bool discrete_actions() const override { return true; }
  int action_count() const override { return model_.action_count; }
  double gamma() const override { return gamma_; }
  double cost_limit() const override { return cost_limit_; }
  void set_cost_limit(double d) override { cost_limit_ = d; }
  int horizon() const override { return horizon_; }

  Vec reset(Rng& rng) override;
  StepOutcome step(const Vec& action, Rng& rng) override;

  const TabularCmdp& model() const { return model_; }
  const GridTaskParams& grid_params() const { return grid_params_; }

 private:
  Vec one_hot(int s) const;

  TabularCmdp model_;
  GridTaskParams grid_params_;
  std::vector<int> terminal_states_;
  uint64_t task_id_ = 0;
  double gamma_ = 0.95;
  double cost_limit_ = 0.25;
  int horizon_ = 60;
  int state_ = 0;
};

}  // namespace cmaml::envs
