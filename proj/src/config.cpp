#include "treedec/config.hpp"

#include <istream>
#include <stdexcept>

namespace treedec {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    if (!config.values_.emplace(key, value).second)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
  }
  return config;
}

bool Config::has(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return false;
  used_[key] = true;
  return true;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  return it->second;
}

long Config::get(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t used = 0;
    long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::runtime_error("");
    return v;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "': expected integer, got '" +
                             it->second + "'");
  }
}

double Config::get(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::runtime_error("");
    return v;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "': expected number, got '" +
                             it->second + "'");
  }
}

void Config::require_known() const {
  for (const auto& [key, value] : values_)
    if (!used_.count(key))
      throw std::runtime_error("config: unknown key '" + key + "'");
}

}  // namespace treedec
