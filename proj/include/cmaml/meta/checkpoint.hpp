#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cmaml/numkit/mlp.hpp"

namespace cmaml::meta {

using numkit::MlpSpec;
using numkit::Vec;

/// Versioned snapshot of the meta-training state. Serialized as a text
/// container (magic string + format version first); floating-point values
/// are written with 17 significant digits so reload is bit-exact and files
/// are byte-stable across runs on the same platform.
struct MetaCheckpoint {
  uint64_t seed = 0;
  int outer_iteration = 0;
  double meta_lambda = 0.0;
  double eta = 0.0;
  MlpSpec policy_spec;
  MlpSpec critic_spec;
  Vec meta_policy;
  Vec meta_cost_critic;
  std::map<std::string, std::string> config_echo;
};

void save_checkpoint(const MetaCheckpoint& checkpoint, const std::string& path);
MetaCheckpoint load_checkpoint(const std::string& path);

std::string head_name(numkit::OutputHead head);
std::string activation_name(numkit::Activation activation);
numkit::OutputHead head_from_name(const std::string& name);
numkit::Activation activation_from_name(const std::string& name);

}  // namespace cmaml::meta
