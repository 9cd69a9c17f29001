#include "byzsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace byzsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config: line " << line_no << ": expected 'key = value'";
      throw std::runtime_error(os.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream os;
      os << "config: line " << line_no << ": empty key";
      throw std::runtime_error(os.str());
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  if (raw == "inf" || raw == "+inf") return kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' is not a number: '" + raw + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

Index KeyValueConfig::get_index(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' is not an integer: '" + raw + "'");
  }
}

Index KeyValueConfig::get_index(const std::string& key, Index fallback) const {
  return has(key) ? get_index(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "off" || raw == "no") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + raw + "'");
}

Rational KeyValueConfig::get_rational(const std::string& key) const {
  try {
    return rational_from_string(get_string(key));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("config: key '" + key + "': " + e.what());
  }
}

std::vector<std::uint64_t> KeyValueConfig::get_seed_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<std::uint64_t> out;
  std::istringstream in(raw);
  std::string token;
  while (std::getline(in, token, ',')) {
    const std::string t = trim(token);
    if (t.empty()) continue;
    try {
      out.push_back(std::stoull(t));
    } catch (const std::exception&) {
      throw std::runtime_error("config: key '" + key + "' has a bad seed: '" + t + "'");
    }
  }
  if (out.empty()) throw std::runtime_error("config: key '" + key + "' lists no seeds");
  return out;
}

std::string KeyValueConfig::canonical_text() const {
  std::ostringstream os;
  for (const auto& [key, value] : entries_) os << key << " = " << value << '\n';
  return os.str();
}

std::string KeyValueConfig::hash() const {
  const std::string text = canonical_text();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace byzsim
