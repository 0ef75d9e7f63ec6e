#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace treedec {

// `key = value` lines, '#' comments. Unknown keys are rejected when the
// caller closes the file with require_known(); see docs/formats.md for the
// key list.
class Config {
 public:
  static Config parse(std::istream& in);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  long get(const std::string& key, long fallback) const;
  double get(const std::string& key, double fallback) const;

  // Throws when a key was present in the file but never read.
  void require_known() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace treedec
