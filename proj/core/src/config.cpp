#include "grasplab/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace grasplab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

KvConfig KvConfig::from_file(const std::string& path) {
  KvConfig cfg;
  cfg.merge_file(path);
  return cfg;
}

void KvConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value at " + path + ":" + std::to_string(line_no));
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void KvConfig::set_pair(const std::string& pair) {
  const std::size_t eq = pair.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + pair + "'");
  set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
}

void KvConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty config key");
  values_[key] = value;
}

const std::string* KvConfig::lookup(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

double KvConfig::get_double(const std::string& key, double def) {
  const std::string* v = lookup(key);
  if (!v) {
    resolved_[key] = format_double(def);
    return def;
  }
  char* end = nullptr;
  const double out = std::strtod(v->c_str(), &end);
  if (end == v->c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "' is not a number: '" + *v + "'");
  }
  resolved_[key] = *v;
  return out;
}

long KvConfig::get_long(const std::string& key, long def) {
  const std::string* v = lookup(key);
  if (!v) {
    resolved_[key] = std::to_string(def);
    return def;
  }
  char* end = nullptr;
  const long out = std::strtol(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "' is not an integer: '" + *v + "'");
  }
  resolved_[key] = *v;
  return out;
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t def) {
  const std::string* v = lookup(key);
  if (!v) {
    resolved_[key] = std::to_string(def);
    return def;
  }
  char* end = nullptr;
  const unsigned long long out = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "' is not an unsigned integer: '" + *v + "'");
  }
  resolved_[key] = *v;
  return out;
}

bool KvConfig::get_bool(const std::string& key, bool def) {
  const std::string* v = lookup(key);
  if (!v) {
    resolved_[key] = def ? "true" : "false";
    return def;
  }
  if (*v == "true" || *v == "1" || *v == "yes") {
    resolved_[key] = *v;
    return true;
  }
  if (*v == "false" || *v == "0" || *v == "no") {
    resolved_[key] = *v;
    return false;
  }
  throw ConfigError("key '" + key + "' is not a boolean: '" + *v + "'");
}

std::vector<double> KvConfig::get_list(const std::string& key, const std::vector<double>& def) {
  const std::string* v = lookup(key);
  if (!v) {
    std::string text;
    for (std::size_t i = 0; i < def.size(); ++i) {
      if (i) text += ',';
      text += format_double(def[i]);
    }
    resolved_[key] = text;
    return def;
  }
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v->size()) {
    const std::size_t comma = v->find(',', pos);
    const std::string tok =
        trim(v->substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (!tok.empty()) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' has a non-numeric list item: '" + tok + "'");
      }
      out.push_back(x);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
  resolved_[key] = *v;
  return out;
}

std::string KvConfig::get_string(const std::string& key, const std::string& def) {
  const std::string* v = lookup(key);
  if (!v) {
    resolved_[key] = def;
    return def;
  }
  resolved_[key] = *v;
  return *v;
}

void KvConfig::finish() const {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : values_) {
    if (!consumed_.count(k)) unknown.push_back(k);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }
}

std::string KvConfig::resolved_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : resolved_) out << k << " = " << v << '\n';
  return out.str();
}

void KvConfig::write_resolved(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << resolved_text();
}

}  // namespace grasplab
