#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "grasplab/errors.hpp"

namespace grasplab {

// Flat key=value configuration. '#' starts a comment; blank lines ignored.
// Typed getters record the resolved value (explicit or default) so a run can
// dump the exact configuration it used; keys that were set but never read
// are rejected by finish().
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::string& path);
  void merge_file(const std::string& path);
  // Accepts "key=value"; later settings win.
  void set_pair(const std::string& pair);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double def);
  long get_long(const std::string& key, long def);
  std::uint64_t get_u64(const std::string& key, std::uint64_t def);
  bool get_bool(const std::string& key, bool def);
  std::string get_string(const std::string& key, const std::string& def);
  // Comma-separated list of numbers, e.g. "0.25,0.35,0.45".
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def);

  // Throws ConfigError listing any key that was never consumed.
  void finish() const;

  // key=value lines of everything resolved, sorted by key.
  std::string resolved_text() const;
  void write_resolved(const std::string& path) const;

 private:
  const std::string* lookup(const std::string& key);

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace grasplab
