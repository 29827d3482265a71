#include "reefforge/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "reefforge/errors.hpp"
#include "reefforge/fsio.hpp"

namespace reefforge {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KVConfig KVConfig::parse(const std::string& text) {
  KVConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected `key: value`");
    std::string key = trim(t.substr(0, colon));
    std::string value = trim(t.substr(colon + 1));
    if (key.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

KVConfig KVConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

std::optional<std::string> KVConfig::find(const std::string& key) const {
  for (const auto& [k, v] : items_)
    if (k == key) return v;
  return std::nullopt;
}

bool KVConfig::has(const std::string& key) const { return find(key).has_value(); }

std::string KVConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto v = find(key);
  return v ? *v : fallback;
}

double KVConfig::get_double(const std::string& key, double fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  try {
    size_t pos = 0;
    double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing chars");
    return d;
  } catch (const std::exception&) {
    throw ParseError("config key `" + key + "`: not a number: " + *v);
  }
}

int64_t KVConfig::get_int(const std::string& key, int64_t fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    throw ParseError("config key `" + key + "`: not an integer: " + *v);
  return out;
}

bool KVConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ParseError("config key `" + key + "`: not a boolean: " + *v);
}

std::string KVConfig::require_string(const std::string& key) const {
  auto v = find(key);
  if (!v) throw ValidationError("config: missing required key `" + key + "`");
  return *v;
}

double KVConfig::require_double(const std::string& key) const {
  if (!has(key)) throw ValidationError("config: missing required key `" + key + "`");
  return get_double(key, 0.0);
}

void KVConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : items_)
    if (k == key) {
      v = value;
      return;
    }
  items_.emplace_back(key, value);
}

void KVConfig::set(const std::string& key, double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  set(key, os.str());
}

void KVConfig::set(const std::string& key, int64_t value) { set(key, std::to_string(value)); }

std::string KVConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : items_) {
    out += k;
    out += ": ";
    out += v;
    out += '\n';
  }
  return out;
}

void KVConfig::save(const std::filesystem::path& path) const {
  write_text_file_atomic(path, serialize());
}

}  // namespace reefforge
