#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "treedec/canonicalize.hpp"
#include "treedec/likelihood.hpp"
#include "treedec/model.hpp"

namespace treedec {

template <class Scalar>
struct SearchOptions {
  int global_beam = 6;   // G: trees kept per round
  int local_beam = 6;    // L: child groups per leaf expansion
  int node_cap = 64;     // generated nodes per tree, successors beyond it dropped
  int max_word_depth = 0;  // 0 = unlimited; otherwise leaves at the cap close with EOB
  bool validate = false;   // recheck every stored score against the likelihood
  bool length_normalize = false;  // divide ranking scores by node count (off by default)
};

template <class Scalar>
struct ScoredTree {
  TernaryPtr tree;
  Scalar score = 0;
};

template <class Scalar>
struct SearchResult {
  std::vector<ScoredTree<Scalar>> trees;
  bool truncated = false;  // some successor hit the node cap
};

template <class Scalar>
struct ChildGroup {
  std::array<TokenId, 3> tokens{kEob, kEob, kEob};
  Scalar score = 0;  // log p of the whole group
};

namespace detail {

// Width-L chain beam search over the K sequential child positions. The
// per-position hidden states are fixed inputs; only sibling history varies.
template <class Scalar>
std::vector<ChildGroup<Scalar>> chain_search_groups(
    const Vector<Scalar>& latent, TokenId parent,
    const std::vector<Vector<Scalar>>& states, const TreeDecoderModel<Scalar>& m, int L,
    bool eob_only) {
  const int arity = m.dims.arity;
  std::vector<ChildGroup<Scalar>> partials{ChildGroup<Scalar>{}};
  for (int k = 0; k < arity; ++k) {
    std::vector<ChildGroup<Scalar>> extended;
    for (const ChildGroup<Scalar>& partial : partials) {
      std::vector<TokenId> previous(partial.tokens.begin(), partial.tokens.begin() + k);
      const Vector<Scalar> head_in =
          child_head_input(m, latent, parent, states[k], previous);
      const Vector<Scalar> logp = m.child_head[k].log_probs(head_in);
      if (eob_only) {
        ChildGroup<Scalar> next = partial;
        next.score += logp[kEob];
        extended.push_back(next);
        continue;
      }
      for (TokenId v = 0; v < m.dims.vocab; ++v) {
        ChildGroup<Scalar> next = partial;
        next.tokens[k] = v;
        next.score += logp[v];
        extended.push_back(next);
      }
    }
    std::stable_sort(extended.begin(), extended.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    if (static_cast<int>(extended.size()) > L) extended.resize(L);
    partials = std::move(extended);
  }
  return partials;
}

}  // namespace detail

// Up to L scored child groups for an open leaf, best first. parent_hidden is
// the state that was threaded to the leaf when its own group was generated
// (zero for the root).
template <class Scalar>
std::vector<ChildGroup<Scalar>> local_child_search(const Vector<Scalar>& latent,
                                                   TokenId parent,
                                                   const Vector<Scalar>& parent_hidden,
                                                   const TreeDecoderModel<Scalar>& m,
                                                   int L) {
  if (L < 1) throw std::invalid_argument("local_child_search: L must be >= 1");
  const auto states = child_states(parent, parent_hidden, latent, m);
  return detail::chain_search_groups(latent, parent, states, m, L, false);
}

namespace detail {

template <class Scalar>
struct OpenLeaf {
  std::vector<int> path;  // slot indices from the root
  Vector<Scalar> hidden;  // state threaded to this leaf
  TokenId token = kEob;
  int word_depth = 1;
};

template <class Scalar>
struct BeamState {
  TernaryPtr tree;
  Scalar score = 0;
  std::vector<OpenLeaf<Scalar>> frontier;
  int nodes = 1;
  long seq = 0;
};

inline TernaryNode* at_path(TernaryNode* node, const std::vector<int>& path) {
  for (int slot : path) node = node->slot[slot].get();
  return node;
}

inline void tree_key(const TernaryNode& node, std::string& key) {
  key += std::to_string(node.token);
  key += '(';
  for (const auto& s : node.slot) {
    if (s)
      tree_key(*s, key);
    else
      key += '.';
    key += ',';
  }
  key += ')';
}

template <class Scalar>
bool better(const BeamState<Scalar>& a, const BeamState<Scalar>& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.seq < b.seq;
}

// One round of successors for one tree: each open leaf grows L candidate
// child groups, every successor differing from the parent at exactly that
// leaf. Successors that would exceed the node cap are dropped and flagged.
template <class Scalar>
std::vector<BeamState<Scalar>> expand_state(const BeamState<Scalar>& state,
                                            const Vector<Scalar>& latent,
                                            const TreeDecoderModel<Scalar>& m,
                                            const SearchOptions<Scalar>& options,
                                            long& seq, bool& truncated) {
  const int arity = m.dims.arity;
  std::vector<BeamState<Scalar>> successors;
  for (std::size_t leaf_idx = 0; leaf_idx < state.frontier.size(); ++leaf_idx) {
    const auto& leaf = state.frontier[leaf_idx];
    if (state.nodes + arity > options.node_cap) {
      truncated = true;
      continue;
    }
    const bool at_cap =
        options.max_word_depth > 0 && leaf.word_depth >= options.max_word_depth;
    const auto states = child_states(leaf.token, leaf.hidden, latent, m);
    const auto groups =
        detail::chain_search_groups(latent, leaf.token, states, m, options.local_beam,
                                    at_cap);
    for (const ChildGroup<Scalar>& group : groups) {
      BeamState<Scalar> next;
      next.tree = clone(*state.tree);
      next.score = state.score + group.score;
      next.nodes = state.nodes + arity;
      next.seq = seq++;
      next.frontier.reserve(state.frontier.size() - 1 + arity);
      for (std::size_t j = 0; j < state.frontier.size(); ++j)
        if (j != leaf_idx) next.frontier.push_back(state.frontier[j]);
      TernaryNode* target = detail::at_path(next.tree.get(), leaf.path);
      for (int k = 0; k < arity; ++k) {
        target->slot[k] = std::make_unique<TernaryNode>(group.tokens[k]);
        if (group.tokens[k] != kEob) {
          OpenLeaf<Scalar> open;
          open.path = leaf.path;
          open.path.push_back(k);
          open.hidden = states[k];
          open.token = group.tokens[k];
          open.word_depth = leaf.word_depth + 1;
          next.frontier.push_back(std::move(open));
        }
      }
      successors.push_back(std::move(next));
    }
  }
  return successors;
}

}  // namespace detail

// Top-down tree inference: keep the G most probable partial trees, expand
// one open leaf per successor with L candidate child groups, and collect
// trees whose leaves are all EOB until G of them exist (or nothing is left
// to expand). Completed trees found among the survivors are deduplicated
// structurally.
template <class Scalar>
SearchResult<Scalar> generalized_beam_search(const Vector<Scalar>& latent,
                                             const TreeDecoderModel<Scalar>& m,
                                             const SearchOptions<Scalar>& options) {
  using State = detail::BeamState<Scalar>;
  const int G = options.global_beam;
  if (G < 1 || options.local_beam < 1)
    throw std::invalid_argument("generalized_beam_search: beams must be >= 1");

  SearchResult<Scalar> result;
  std::vector<State> completed;
  std::set<std::string> seen;
  long seq = 0;

  auto validate_state = [&](const State& state) {
    if (!options.validate) return;
    const Scalar replay = partial_tree_log_likelihood(*state.tree, latent, m);
    if (std::abs(replay - state.score) > Scalar(1e-9))
      throw std::logic_error("beam state score drifted from the likelihood");
  };
  auto finish = [&](const State& state) {
    std::string key;
    detail::tree_key(*state.tree, key);
    if (!seen.insert(key).second) return;
    State copy;
    copy.tree = clone(*state.tree);
    copy.score = state.score;
    copy.seq = state.seq;
    completed.push_back(std::move(copy));
  };

  // seed with the G most probable roots
  std::vector<State> beam;
  {
    const Vector<Scalar> root_logp = m.root_head.log_probs(latent);
    std::vector<TokenId> order(m.dims.vocab);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
      return root_logp[a] > root_logp[b];
    });
    const Vector<Scalar> zero = Vector<Scalar>::Zero(m.dims.hidden);
    for (int i = 0; i < std::min<int>(G, m.dims.vocab); ++i) {
      State state;
      state.tree = std::make_unique<TernaryNode>(order[i]);
      state.score = root_logp[order[i]];
      state.nodes = 1;
      state.seq = seq++;
      if (order[i] != kEob)
        state.frontier.push_back({{}, zero, order[i], 1});
      validate_state(state);
      if (state.frontier.empty())
        finish(state);  // a bare EOB root is already complete
      beam.push_back(std::move(state));
    }
  }

  while (static_cast<int>(completed.size()) < G && !beam.empty()) {
    std::vector<State> successors;
    for (const State& state : beam) {
      auto expanded =
          detail::expand_state(state, latent, m, options, seq, result.truncated);
      for (State& next : expanded) {
        validate_state(next);
        successors.push_back(std::move(next));
      }
    }
    std::stable_sort(successors.begin(), successors.end(), detail::better<Scalar>);
    if (static_cast<int>(successors.size()) > G) successors.resize(G);
    for (const State& state : successors)
      if (state.frontier.empty()) finish(state);
    beam = std::move(successors);
  }

  std::stable_sort(completed.begin(), completed.end(), detail::better<Scalar>);
  if (static_cast<int>(completed.size()) > G) completed.resize(G);
  for (State& state : completed) {
    Scalar score = state.score;
    if (options.length_normalize) score /= static_cast<Scalar>(node_count(*state.tree));
    result.trees.push_back({std::move(state.tree), score});
  }
  if (options.length_normalize)
    std::stable_sort(result.trees.begin(), result.trees.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
  return result;
}

template <class Scalar>
struct RankedResponse {
  std::vector<TokenId> tokens;
  Scalar score = 0;
};

template <class Scalar>
struct GenerationResult {
  std::vector<RankedResponse<Scalar>> responses;
  bool truncated = false;
  std::string diagnostic;
};

// Sentence order of a decoded tree: ternary in-order for the canonical
// arity-3 pipeline, root-to-leaf preorder for chains.
inline std::vector<TokenId> decoded_sentence(const TernaryNode& tree, int arity) {
  if (arity == 3) return flatten_ternary(tree);
  std::vector<TokenId> tokens;
  for (const TernaryNode* at = &tree; at; at = at->slot[0].get())
    if (!at->is_eob()) tokens.push_back(at->token);
  return tokens;
}

// encode -> search -> flatten. Distinct trees flattening to the same
// sentence are kept as separate ranked entries.
template <class Scalar>
GenerationResult<Scalar> generate_response(const std::vector<TokenId>& post,
                                           const TreeDecoderModel<Scalar>& m,
                                           const SearchOptions<Scalar>& options) {
  const Vector<Scalar> latent = encode(post, m);
  SearchResult<Scalar> searched = generalized_beam_search(latent, m, options);
  GenerationResult<Scalar> result;
  result.truncated = searched.truncated;
  for (const ScoredTree<Scalar>& entry : searched.trees)
    result.responses.push_back({decoded_sentence(*entry.tree, m.dims.arity), entry.score});
  if (result.responses.empty())
    result.diagnostic = searched.truncated
                            ? "search exhausted: node cap reached before any tree completed"
                            : "search exhausted: no completable tree";
  return result;
}

}  // namespace treedec
