#include "treedec/instances.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "treedec/canonicalize.hpp"
#include "treedec/conllu.hpp"
#include "treedec/tree_io.hpp"

namespace treedec {

InstanceBuild make_instances(const std::vector<RawPair>& pairs, const Vocabulary& vocab,
                             int post_cap) {
  InstanceBuild build;
  build.instances.reserve(pairs.size());
  for (const RawPair& pair : pairs) {
    std::vector<TokenId> response_ids = vocab.encode(pair.response.tokens);
    SpNode sp;
    try {
      sp = dep_to_sp(pair.response, response_ids);
    } catch (const TreeError&) {
      ++build.skipped_nonprojective;
      continue;
    }
    TrainingInstance instance;
    instance.post = vocab.encode(pair.post);
    if (post_cap > 0 && static_cast<int>(instance.post.size()) > post_cap) {
      instance.post.resize(post_cap);
      ++build.truncated_posts;
    }
    instance.tree = pad_eob(*canonicalize(sp));
    build.instances.push_back(std::move(instance));
  }
  return build;
}

void write_instances(std::ostream& out, const std::vector<TrainingInstance>& instances,
                     const Vocabulary& vocab) {
  for (const TrainingInstance& instance : instances) {
    for (std::size_t i = 0; i < instance.post.size(); ++i) {
      if (i) out << ' ';
      out << instance.post[i];
    }
    out << '\t' << to_text(*instance.tree, vocab) << '\n';
  }
}

std::vector<TrainingInstance> read_instances(std::istream& in, const Vocabulary& vocab) {
  std::vector<TrainingInstance> instances;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw TreeError("instances line " + std::to_string(line_no) + ": missing tab");
    TrainingInstance instance;
    std::istringstream post(line.substr(0, tab));
    long id;
    while (post >> id) {
      if (id < 0 || id >= static_cast<long>(vocab.size()))
        throw TreeError("instances line " + std::to_string(line_no) +
                        ": post index out of range");
      instance.post.push_back(static_cast<TokenId>(id));
    }
    instance.tree = parse_ternary(line.substr(tab + 1), vocab);
    instances.push_back(std::move(instance));
  }
  return instances;
}

void write_pairs_tsv(std::ostream& out, const std::vector<RawPair>& pairs) {
  auto join = [&](const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) s += ' ';
      s += tokens[i];
    }
    return s;
  };
  for (const RawPair& pair : pairs)
    out << join(pair.post) << '\t' << join(pair.response.tokens) << '\n';
}

void write_conllu(std::ostream& out, const DependencyTree& tree) {
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const int head = tree.head[i] < 0 ? 0 : tree.head[i] + 1;
    out << (i + 1) << '\t' << tree.tokens[i] << "\t_\t_\t_\t_\t" << head << "\t_\t_\t_\n";
  }
  out << '\n';
}

std::vector<RawPair> read_pairs(std::istream& pairs_tsv, std::istream& conllu) {
  std::vector<std::vector<std::string>> posts;
  std::vector<std::vector<std::string>> responses;
  std::string line;
  int line_no = 0;
  auto split = [](const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
  };
  while (std::getline(pairs_tsv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw TreeError("pairs line " + std::to_string(line_no) + ": missing tab");
    posts.push_back(split(line.substr(0, tab)));
    responses.push_back(split(line.substr(tab + 1)));
  }

  ConlluResult parses = read_conllu(conllu);
  if (!parses.rejected.empty())
    throw TreeError("parse file: sentence at line " +
                    std::to_string(parses.rejected.front().line) + " rejected: " +
                    parses.rejected.front().reason);
  if (parses.trees.size() != posts.size())
    throw TreeError("pairs/parses mismatch: " + std::to_string(posts.size()) +
                    " pairs vs " + std::to_string(parses.trees.size()) + " parses");

  std::vector<RawPair> pairs;
  pairs.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (parses.trees[i].tokens != responses[i])
      throw TreeError("pair " + std::to_string(i + 1) +
                      ": response text does not match its parse");
    pairs.push_back({std::move(posts[i]), std::move(parses.trees[i])});
  }
  return pairs;
}

}  // namespace treedec
