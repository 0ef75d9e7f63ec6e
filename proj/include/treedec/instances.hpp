#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treedec/tree.hpp"
#include "treedec/vocabulary.hpp"

namespace treedec {

// A post with its parsed response, before vocabulary mapping.
struct RawPair {
  std::vector<std::string> post;
  DependencyTree response;
};

// Post as token indices plus the padded ternary response tree.
struct TrainingInstance {
  std::vector<TokenId> post;
  TernaryPtr tree;
};

struct InstanceBuild {
  std::vector<TrainingInstance> instances;
  int skipped_nonprojective = 0;
  int truncated_posts = 0;
};

// Encodes posts (truncated to post_cap tokens when post_cap > 0) and runs
// each response through dep_to_sp, canonicalize and pad_eob. Pairs whose
// parse is non-projective are skipped and counted.
InstanceBuild make_instances(const std::vector<RawPair>& pairs, const Vocabulary& vocab,
                             int post_cap = 0);

// Line format: space-separated post indices, a tab, then the tree text.
void write_instances(std::ostream& out, const std::vector<TrainingInstance>& instances,
                     const Vocabulary& vocab);
std::vector<TrainingInstance> read_instances(std::istream& in, const Vocabulary& vocab);

// Raw pair files: posts and responses as text, one pair per line separated
// by a tab; parses in a parallel CoNLL-U file.
void write_pairs_tsv(std::ostream& out, const std::vector<RawPair>& pairs);
void write_conllu(std::ostream& out, const DependencyTree& tree);

// Joins a pairs.tsv stream with its CoNLL-U parse stream; the i-th parse
// must spell the i-th response. Throws on any mismatch.
std::vector<RawPair> read_pairs(std::istream& pairs_tsv, std::istream& conllu);

}  // namespace treedec
