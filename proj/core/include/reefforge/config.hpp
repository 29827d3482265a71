#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reefforge {

// Flat `key: value` config text. One pair per line, `#` starts a comment,
// blank lines ignored. Values are kept verbatim (as trimmed strings), so a
// parse -> serialize round trip reproduces every value exactly. Used for the
// pipeline config file and the emitted trainer config.
class KVConfig {
 public:
  KVConfig() = default;

  static KVConfig parse(const std::string& text);
  static KVConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // throwing variants for required keys
  std::string require_string(const std::string& key) const;
  double require_double(const std::string& key) const;

  // set() keeps first-insertion order for serialize(); re-setting overwrites in place
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int64_t value);

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::optional<std::string> find(const std::string& key) const;
  std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace reefforge
