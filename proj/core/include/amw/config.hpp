#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace amw {

/// Flat `key = value` configuration. Values are JSON literals (numbers, quoted
/// strings, true/false, arrays); a bare word is read as a string. `#` starts a
/// comment. Keys are case-sensitive and must be unique.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Overrides key `k` from the environment variable PREFIX + upper(k), for every
  /// key in `keys`.
  void apply_env_overrides(const std::string& prefix, const std::vector<std::string>& keys);

  void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, nlohmann::json>& values() const noexcept { return values_; }

  template <typename T>
  std::optional<T> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    try {
      return it->second.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw_type_error(key);
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    auto v = get<T>(key);
    return v ? *v : fallback;
  }

  /// Keys present in the file but not in `known`.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

  /// Canonical text (sorted keys), used for provenance hashing.
  std::string canonical() const;

 private:
  [[noreturn]] void throw_type_error(const std::string& key) const;

  std::string origin_;
  std::map<std::string, nlohmann::json> values_;
};

}  // namespace amw
