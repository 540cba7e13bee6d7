#include "plastokit/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "plastokit/errors.hpp"

namespace plastokit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(where + ": missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (c.values_.count(full)) throw ParseError(where + ": duplicate key '" + full + "'");
    c.values_[full] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InvalidArgument("cannot open config file " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file);
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument(origin_ + ": missing required key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE)
    throw ParseError(origin_ + ": key '" + key + "' expects a number, got '" + v + "'");
  return d;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE)
    throw ParseError(origin_ + ": key '" + key + "' expects an integer, got '" + v + "'");
  return i;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(origin_ + ": key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<int> Config::get_ints(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  std::vector<int> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const long x = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0')
      throw ParseError(origin_ + ": key '" + key + "' expects comma-separated integers, got '" + v + "'");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

void Config::check_all_used() const {
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) throw InvalidArgument(origin_ + ": unknown key '" + k + "'");
}

}  // namespace plastokit
