#include "cmaml/envs/task_distribution.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmaml/errors.hpp"

namespace cmaml::envs {

namespace {
constexpr uint64_t kCatalogTag = 0x636174616c6f67ULL;
}

std::vector<uint64_t> catalog_task_seeds(const TaskDistribution& dist) {
  std::vector<uint64_t> seeds;
  seeds.reserve(dist.count);
  const uint64_t family_tag = (dist.family == Family::Tabular) ? 1 : 2;
  const uint64_t diff_tag = (dist.difficulty == Difficulty::Env1Like) ? 1 : 2;
  for (int i = 0; i < dist.count; ++i)
    seeds.push_back(numkit::stream_seed(dist.master_seed, kCatalogTag,
                                        family_tag * 16 + diff_tag,
                                        static_cast<uint64_t>(i)));
  return seeds;
}

std::unique_ptr<CmdpTask> make_task(const TaskDistribution& dist,
                                    uint64_t task_seed) {
  if (dist.family == Family::Tabular) {
    GridTaskParams params = make_grid_params(task_seed);
    params.gamma = dist.gamma;
    params.cost_limit = dist.cost_limit;
    params.horizon = dist.horizon;
    return std::make_unique<TabularTask>(params);
  }
  PointNavParams params = make_point_nav_params(task_seed, dist.difficulty);
  params.gamma = dist.gamma;
  params.cost_limit = dist.cost_limit;
  params.horizon = dist.horizon;
  return std::make_unique<PointNavTask>(params);
}

std::vector<uint64_t> sample_task_seeds(const TaskDistribution& dist, int b,
                                        Rng& rng, int index_lo, int index_hi) {
  const auto catalog = catalog_task_seeds(dist);
  if (index_hi < 0) index_hi = static_cast<int>(catalog.size());
  if (index_lo < 0 || index_hi > static_cast<int>(catalog.size()) ||
      index_lo >= index_hi)
    throw ShapeError("sample_task_seeds: bad catalog index range");
  const int range = index_hi - index_lo;
  if (b < 1 || b > range)
    throw ShapeError("sample_task_seeds: B outside [1, catalog range]");

  // partial Fisher-Yates over the index range
  std::vector<int> indices(range);
  for (int i = 0; i < range; ++i) indices[i] = index_lo + i;
  std::vector<uint64_t> out;
  out.reserve(b);
  for (int i = 0; i < b; ++i) {
    const int j = i + rng.uniform_int(range - i);
    std::swap(indices[i], indices[j]);
    out.push_back(catalog[indices[i]]);
  }
  return out;
}

std::string manifest_line(const TaskDistribution& dist, uint64_t task_seed) {
  std::ostringstream os;
  os << task_seed << ' ' << family_name(dist.family) << ' '
     << difficulty_name(dist.difficulty);
  char buf[64];
  if (dist.family == Family::Tabular) {
    const GridTaskParams params = make_grid_params(task_seed);
    os << " start=" << params.start_cell << " goal=" << params.goal_cell
       << " hazards=";
    for (size_t i = 0; i < params.hazard_cells.size(); ++i)
      os << (i ? "," : "") << params.hazard_cells[i];
  } else {
    const PointNavParams params =
        make_point_nav_params(task_seed, dist.difficulty);
    std::snprintf(buf, sizeof(buf), " start=%.6f,%.6f goal=%.6f,%.6f",
                  params.start.x(), params.start.y(), params.goal.x(),
                  params.goal.y());
    os << buf;
    os << " hazards=";
    for (size_t i = 0; i < params.hazards.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.6f,%.6f", i ? ";" : "",
                    params.hazards[i].x, params.hazards[i].y);
      os << buf;
    }
    os << " vases=";
    for (size_t i = 0; i < params.vases.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.6f,%.6f", i ? ";" : "",
                    params.vases[i].x, params.vases[i].y);
      os << buf;
    }
  }
  return os.str();
}

void write_manifest(const TaskDistribution& dist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  for (uint64_t seed : catalog_task_seeds(dist))
    out << manifest_line(dist, seed) << '\n';
}

std::string family_name(Family family) {
  return family == Family::Tabular ? "tabular" : "point_nav";
}

std::string difficulty_name(Difficulty difficulty) {
  return difficulty == Difficulty::Env1Like ? "env1_like" : "env2_like";
}

Family family_from_name(const std::string& name) {
  if (name == "tabular") return Family::Tabular;
  if (name == "point_nav") return Family::PointNav;
  throw ConfigError("unknown task family: " + name);
}

Difficulty difficulty_from_name(const std::string& name) {
  if (name == "env1_like") return Difficulty::Env1Like;
  if (name == "env2_like") return Difficulty::Env2Like;
  throw ConfigError("unknown difficulty: " + name);
}

}  // namespace cmaml::envs
