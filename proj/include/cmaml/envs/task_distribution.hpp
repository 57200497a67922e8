#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cmaml/envs/point_nav.hpp"
#include "cmaml/envs/tabular.hpp"
#include "cmaml/envs/task.hpp"

namespace cmaml::envs {

enum class Family { Tabular, PointNav };
using Difficulty = NavDifficulty;

/// Seeded task family. Regenerating with the same fields yields bit-identical
/// tasks; the catalog is the list of per-task seeds derived from master_seed.
struct TaskDistribution {
  Family family = Family::PointNav;
  Difficulty difficulty = Difficulty::Env2Like;
  uint64_t master_seed = 0;
  int count = 106;  // catalog size (107 for env1-like, 106 for env2-like)
  double gamma = 0.99;
  double cost_limit = 5.0;
  int horizon = 60;
};

std::vector<uint64_t> catalog_task_seeds(const TaskDistribution& dist);

std::unique_ptr<CmdpTask> make_task(const TaskDistribution& dist,
                                    uint64_t task_seed);

/// B task seeds drawn uniformly without replacement from catalog indices
/// [index_lo, index_hi) (the full catalog by default). Throws ShapeError when
/// B exceeds the range.
std::vector<uint64_t> sample_task_seeds(const TaskDistribution& dist, int b,
                                        Rng& rng, int index_lo = 0,
                                        int index_hi = -1);

std::string manifest_line(const TaskDistribution& dist, uint64_t task_seed);
void write_manifest(const TaskDistribution& dist, const std::string& path);

std::string family_name(Family family);
std::string difficulty_name(Difficulty difficulty);
Family family_from_name(const std::string& name);
Difficulty difficulty_from_name(const std::string& name);

}  // namespace cmaml::envs
