#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "treedec/tree.hpp"

namespace treedec {

// Token/index bijection with <eob> and <unk> pinned to the reserved slots.
class Vocabulary {
 public:
  static constexpr const char* kEobText = "<eob>";
  static constexpr const char* kUnkText = "<unk>";

  Vocabulary();

  // Keeps the max_words most frequent tokens; ties broken by first
  // occurrence, so identical corpora yield identical vocabularies.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::size_t max_words);

  // Collects every distinct token, in first-occurrence order.
  static Vocabulary collect(const std::vector<std::vector<std::string>>& sentences);

  TokenId add(const std::string& token);          // no-op when present
  TokenId id(const std::string& token) const;     // kUnk when absent
  bool contains(const std::string& token) const;
  const std::string& text(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }

  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> decode(const std::vector<TokenId>& ids) const;

  // Fraction of token occurrences that map to an in-vocabulary word.
  double coverage(const std::vector<std::vector<std::string>>& sentences) const;

  // FNV-1a over the token list; checkpoints store this to detect mismatched
  // vocabulary files.
  std::uint64_t hash() const;

  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace treedec
