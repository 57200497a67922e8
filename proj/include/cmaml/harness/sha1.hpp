#pragma once

#include <string>

namespace cmaml::harness {

/// SHA-1 hex digest, used as the content hash of resolved run configurations.
std::string sha1_hex(const std::string& data);

}  // namespace cmaml::harness
