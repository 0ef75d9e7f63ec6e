#include "treedec/vocabulary.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace treedec {

Vocabulary::Vocabulary() {
  add(kEobText);
  add(kUnkText);
}

TokenId Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const TokenId id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             std::size_t max_words) {
  struct Entry {
    std::string token;
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t position = 0;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) {
      auto it = seen.find(token);
      if (it == seen.end()) {
        seen.emplace(token, entries.size());
        entries.push_back({token, 1, position});
      } else {
        ++entries[it->second].count;
      }
      ++position;
    }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });

  Vocabulary vocab;
  for (const Entry& e : entries) {
    if (vocab.size() >= max_words + 2) break;  // reserved slots not counted
    vocab.add(e.token);
  }
  return vocab;
}

Vocabulary Vocabulary::collect(const std::vector<std::vector<std::string>>& sentences) {
  Vocabulary vocab;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) vocab.add(token);
  return vocab;
}

TokenId Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

const std::string& Vocabulary::text(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw std::out_of_range("vocabulary: id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<TokenId>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId i : ids) tokens.push_back(text(i));
  return tokens;
}

double Vocabulary::coverage(const std::vector<std::vector<std::string>>& sentences) const {
  std::size_t total = 0, covered = 0;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) {
      ++total;
      if (contains(token)) ++covered;
    }
  return total == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(total);
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& token : tokens_) {
    for (unsigned char c : token) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  }
  return h;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& token : tokens_) out << token << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (row == 0 && line != kEobText)
      throw std::runtime_error("vocabulary file must start with " + std::string(kEobText));
    if (row == 1 && line != kUnkText)
      throw std::runtime_error("vocabulary file must list " + std::string(kUnkText) +
                               " second");
    if (row >= 2) vocab.add(line);
    ++row;
  }
  if (row < 2) throw std::runtime_error("vocabulary file missing reserved tokens");
  return vocab;
}

}  // namespace treedec
