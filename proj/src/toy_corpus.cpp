#include "treedec/toy_corpus.hpp"

#include <stdexcept>

#include "treedec/random_tree.hpp"

namespace treedec {

namespace {

const char* kNouns[] = {"apples",  "bananas", "oranges", "grapes", "mangoes",
                        "peaches", "plums",   "cherries", "lemons", "melons",
                        "carrots", "beans",   "corn",     "rice",   "bread",
                        "cheese",  "soup",    "cake",     "tea",    "milk"};
const char* kVerbs[] = {"like", "love", "want", "need"};

DependencyTree parse(std::vector<std::string> tokens, std::vector<int> head, int root) {
  DependencyTree dep;
  dep.tokens = std::move(tokens);
  dep.head = std::move(head);
  dep.root = root;
  return dep;
}

RawPair liking(const std::string& verb, const std::string& noun) {
  RawPair pair;
  pair.post = {"do", "you", verb, noun};
  pair.response = parse({"i", verb, noun, "very", "much"}, {1, -1, 1, 4, 1}, 1);
  return pair;
}

RawPair about(const std::string& noun) {
  RawPair pair;
  pair.post = {"tell", "me", "about", noun};
  pair.response = parse({noun, "is", "really", "good"}, {1, -1, 3, 1}, 1);
  return pair;
}

RawPair who(const std::string& verb, const std::string& noun) {
  RawPair pair;
  pair.post = {"who", verb, "the", noun};
  pair.response =
      parse({"my", "friend", verb, "the", noun, "at", "home"}, {1, 2, -1, 4, 2, 6, 2}, 2);
  return pair;
}

}  // namespace

std::vector<RawPair> make_toy_corpus(int pairs, std::uint64_t seed) {
  std::vector<RawPair> all;
  all.reserve(180);
  for (const char* v : kVerbs)
    for (const char* n : kNouns) all.push_back(liking(v, n));
  for (const char* n : kNouns) all.push_back(about(n));
  for (const char* v : kVerbs)
    for (const char* n : kNouns) all.push_back(who(v, n));

  if (pairs < 1 || pairs > static_cast<int>(all.size()))
    throw std::invalid_argument("toy corpus: pairs must be in 1.." +
                                std::to_string(all.size()));

  Rng rng(seed);
  for (std::size_t i = all.size() - 1; i > 0; --i) {
    const std::size_t j = uniform_u64(rng, i + 1);
    std::swap(all[i], all[j]);
  }
  all.resize(static_cast<std::size_t>(pairs));
  return all;
}

}  // namespace treedec
