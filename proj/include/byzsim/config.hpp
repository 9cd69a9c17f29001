#pragma once

#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace byzsim {

/// Flat key-value experiment configuration. One "key = value" pair per line,
/// '#' starts a comment, keys are dotted paths, whitespace around tokens is
/// ignored. Later assignments (including CLI overrides) win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_text(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  Index get_index(const std::string& key) const;
  Index get_index(const std::string& key, Index fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Rational get_rational(const std::string& key) const;
  std::vector<std::uint64_t> get_seed_list(const std::string& key) const;

  /// Keys sorted, one per line; the canonical form backing the config hash.
  std::string canonical_text() const;

  /// FNV-1a 64 over the canonical text, as fixed-width hex.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace byzsim
