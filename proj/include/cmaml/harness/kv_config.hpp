#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cmaml::harness {

/// Line-oriented `key = value` configuration with dotted sections
/// (e.g. `outer.B = 8`). Keys keep insertion order so serialization is
/// deterministic; parse(to_string()) is the identity.
class KvConfig {
 public:
  static KvConfig from_string(const std::string& text);
  static KvConfig from_file(const std::string& path);
  std::string to_string() const;
  void save(const std::string& path) const;

  bool has(const std::string& key) const;
  const std::vector<std::string>& keys() const { return order_; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;
  std::vector<uint64_t> get_u64_list(
      const std::string& key, const std::vector<uint64_t>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  void set_u64(const std::string& key, uint64_t value);
  void set_bool(const std::string& key, bool value);

  /// Applies every entry of `other` on top of this config.
  void merge(const KvConfig& other);

  bool operator==(const KvConfig& other) const { return kv_ == other.kv_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> kv_;
};

}  // namespace cmaml::harness
