#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "cmaml/numkit/rng.hpp"

namespace cmaml::envs {

using Vec = Eigen::VectorXd;
using numkit::Rng;

enum class TaskKind { Tabular, PointNav };

struct StepOutcome {
  Vec obs;
  double reward = 0.0;
  double cost = 0.0;
  bool done = false;
};

/// One CMDP task. Instances hold the episode state; they are cheap to create
/// and never shared across workers.
class CmdpTask {
 public:
  virtual ~CmdpTask() = default;

  virtual TaskKind kind() const = 0;
  virtual uint64_t task_id() const = 0;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;  // 1 for discrete (index slot)
  virtual bool discrete_actions() const = 0;
  virtual int action_count() const = 0;  // discrete tasks only
  virtual double gamma() const = 0;
  virtual double cost_limit() const = 0;
  virtual void set_cost_limit(double d) = 0;
  virtual int horizon() const = 0;

  virtual Vec reset(Rng& rng) = 0;
  virtual StepOutcome step(const Vec& action, Rng& rng) = 0;
};

}  // namespace cmaml::envs
