#pragma once

#include <vector>

#include "treedec/instances.hpp"
#include "treedec/model.hpp"

namespace treedec {

// Number of softmax outcomes a padded tree contributes: the root plus K
// slots per word node. Every node of the padded tree is predicted once.
inline int prediction_count(const TernaryNode& tree, int arity) {
  return 1 + arity * word_count(tree);
}

namespace detail {

template <class Scalar>
void check_expandable(const TernaryNode& node, int arity, bool strict) {
  bool any = false, all = true;
  for (int k = 0; k < arity; ++k) {
    if (node.slot[k])
      any = true;
    else
      all = false;
  }
  for (int k = arity; k < 3; ++k)
    if (node.slot[k]) throw TreeError("likelihood: child beyond arity");
  if (any && !all) throw TreeError("likelihood: node with a partial child group");
  if (strict && !any) throw TreeError("likelihood: unpadded tree (word node without children)");
}

// Walks the generated part of a tree, summing child log probabilities.
// `terms` optionally collects per-prediction log probabilities in a fixed
// preorder.
template <class Scalar>
Scalar walk_children(const TernaryNode& node, const Vector<Scalar>& hidden,
                     const Vector<Scalar>& latent, const TreeDecoderModel<Scalar>& m,
                     bool strict, std::vector<Scalar>* terms) {
  check_token(m, node.token);
  const int arity = m.dims.arity;
  check_expandable<Scalar>(node, arity, strict);
  if (!node.slot[0]) return Scalar(0);  // frontier word of a partial tree

  Vector<Scalar> cell_in(m.dims.embed + m.dims.hidden);
  cell_in << m.dec_embed.col(node.token), latent;

  Scalar total = 0;
  std::vector<TokenId> previous;
  std::vector<Vector<Scalar>> states;
  states.reserve(arity);
  for (int k = 0; k < arity; ++k)
    states.push_back(m.child_cell[k].step(cell_in, hidden));
  for (int k = 0; k < arity; ++k) {
    const TernaryNode& child = *node.slot[k];
    check_token(m, child.token);
    const Vector<Scalar> head_in =
        child_head_input(m, latent, node.token, states[k], previous);
    const Scalar term = m.child_head[k].log_probs(head_in)[child.token];
    total += term;
    if (terms) terms->push_back(term);
    previous.push_back(child.token);
  }
  for (int k = 0; k < arity; ++k) {
    const TernaryNode& child = *node.slot[k];
    if (child.is_eob()) {
      if (!child.is_leaf()) throw TreeError("likelihood: eob node with children");
      continue;
    }
    total += walk_children(child, states[k], latent, m, strict, terms);
  }
  return total;
}

}  // namespace detail

// Log probability of a padded full tree given the encoded latent. The root
// is scored by the root head; every slot of every word node contributes one
// child term, with hidden states threaded top-down (h_k feeds child k).
template <class Scalar>
Scalar tree_log_likelihood(const TernaryNode& root, const Vector<Scalar>& latent,
                           const TreeDecoderModel<Scalar>& m) {
  check_token(m, root.token);
  Scalar total = m.root_head.log_probs(latent)[root.token];
  if (root.is_eob()) {
    if (!root.is_leaf()) throw TreeError("likelihood: eob root with children");
    return total;
  }
  const Vector<Scalar> zero = Vector<Scalar>::Zero(m.dims.hidden);
  total += detail::walk_children<Scalar>(root, zero, latent, m, /*strict=*/true, nullptr);
  return total;
}

// Same sum restricted to the nodes whose child groups exist; frontier words
// of a partial tree contribute nothing yet.
template <class Scalar>
Scalar partial_tree_log_likelihood(const TernaryNode& root, const Vector<Scalar>& latent,
                                   const TreeDecoderModel<Scalar>& m) {
  check_token(m, root.token);
  Scalar total = m.root_head.log_probs(latent)[root.token];
  if (root.is_eob()) return total;
  const Vector<Scalar> zero = Vector<Scalar>::Zero(m.dims.hidden);
  total += detail::walk_children<Scalar>(root, zero, latent, m, /*strict=*/false, nullptr);
  return total;
}

// Per-prediction log probabilities: the root term, then K terms per word
// node in preorder. Their sum equals tree_log_likelihood.
template <class Scalar>
std::vector<Scalar> log_prob_terms(const TernaryNode& root, const Vector<Scalar>& latent,
                                   const TreeDecoderModel<Scalar>& m) {
  std::vector<Scalar> terms;
  terms.push_back(m.root_head.log_probs(latent)[root.token]);
  const Vector<Scalar> zero = Vector<Scalar>::Zero(m.dims.hidden);
  if (!root.is_eob())
    detail::walk_children<Scalar>(root, zero, latent, m, /*strict=*/true, &terms);
  return terms;
}

template <class Scalar>
Scalar instance_log_likelihood(const TrainingInstance& instance,
                               const TreeDecoderModel<Scalar>& m) {
  return tree_log_likelihood(*instance.tree, encode(instance.post, m), m);
}

namespace detail {

template <class Scalar>
struct TreeBackprop {
  const TreeDecoderModel<Scalar>& m;
  TreeDecoderModel<Scalar>& grad;
  const Vector<Scalar>& latent;
  Vector<Scalar> d_latent;

  struct NodeWork {
    const TernaryNode* node = nullptr;
    Vector<Scalar> cell_in;
    std::array<typename GruCell<Scalar>::Cache, 3> cell;
    std::array<typename SoftmaxHead<Scalar>::Cache, 3> head;
    std::array<Vector<Scalar>, 3> state;
    std::array<int, 3> kid = {-1, -1, -1};
    std::vector<NodeWork> kids;
  };

  explicit TreeBackprop(const TreeDecoderModel<Scalar>& model,
                        TreeDecoderModel<Scalar>& gradient, const Vector<Scalar>& x)
      : m(model), grad(gradient), latent(x) {
    d_latent = Vector<Scalar>::Zero(m.dims.hidden);
  }

  // forward pass mirroring walk_children, keeping every cache
  Scalar forward(const TernaryNode& node, const Vector<Scalar>& hidden, NodeWork& w) {
    const int arity = m.dims.arity;
    check_expandable<Scalar>(node, arity, /*strict=*/true);
    w.node = &node;
    w.cell_in.resize(m.dims.embed + m.dims.hidden);
    w.cell_in << m.dec_embed.col(node.token), latent;

    Scalar total = 0;
    std::vector<TokenId> previous;
    for (int k = 0; k < arity; ++k)
      w.state[k] = m.child_cell[k].step(w.cell_in, hidden, &w.cell[k]);
    for (int k = 0; k < arity; ++k) {
      const TernaryNode& child = *node.slot[k];
      check_token(m, child.token);
      const Vector<Scalar> head_in =
          child_head_input(m, latent, node.token, w.state[k], previous);
      total += m.child_head[k].log_probs(head_in, &w.head[k])[child.token];
      previous.push_back(child.token);
    }
    for (int k = 0; k < arity; ++k) {
      const TernaryNode& child = *node.slot[k];
      if (child.is_eob()) {
        if (!child.is_leaf()) throw TreeError("likelihood: eob node with children");
        continue;
      }
      w.kid[k] = static_cast<int>(w.kids.size());
      w.kids.emplace_back();
      total += forward(child, w.state[k], w.kids.back());
    }
    return total;
  }

  // returns the gradient w.r.t. the hidden state fed to this node
  Vector<Scalar> backward(NodeWork& w) {
    const int arity = m.dims.arity;
    const int dh = m.dims.hidden;
    const int de = m.dims.embed;
    const TokenId parent = w.node->token;
    Vector<Scalar> d_hidden = Vector<Scalar>::Zero(dh);
    for (int k = arity - 1; k >= 0; --k) {
      Vector<Scalar> d_state = Vector<Scalar>::Zero(dh);

      Vector<Scalar> d_head_in = Vector<Scalar>::Zero(m.child_head[k].input_size());
      m.child_head[k].backward_nll(w.head[k], w.node->slot[k]->token, grad.child_head[k],
                                   d_head_in);
      d_latent += d_head_in.head(dh);
      grad.dec_embed.col(parent) += d_head_in.segment(dh, de);
      d_state += d_head_in.segment(dh + de, dh);
      for (int j = 0; j < k; ++j)
        grad.dec_embed.col(w.node->slot[j]->token) +=
            d_head_in.segment(2 * dh + de + j * de, de);

      if (w.kid[k] >= 0) d_state += backward(w.kids[w.kid[k]]);

      Vector<Scalar> d_cell_in = Vector<Scalar>::Zero(de + dh);
      m.child_cell[k].backward(w.cell[k], d_state, grad.child_cell[k], d_cell_in,
                               d_hidden);
      grad.dec_embed.col(parent) += d_cell_in.head(de);
      d_latent += d_cell_in.tail(dh);
    }
    return d_hidden;
  }
};

}  // namespace detail

// Negative log likelihood of one instance with analytic gradients added to
// `grad` (same shape as the model; caller clears or accumulates).
template <class Scalar>
Scalar nll_gradients(const TrainingInstance& instance, const TreeDecoderModel<Scalar>& m,
                     TreeDecoderModel<Scalar>& grad) {
  if (instance.post.empty()) throw std::invalid_argument("nll_gradients: empty post");
  const TernaryNode& root = *instance.tree;
  check_token(m, root.token);

  // encoder forward
  std::vector<typename GruCell<Scalar>::Cache> enc_cache(instance.post.size());
  Vector<Scalar> h = Vector<Scalar>::Zero(m.dims.hidden);
  for (std::size_t i = 0; i < instance.post.size(); ++i) {
    check_token(m, instance.post[i]);
    h = m.encoder.step(m.enc_embed.col(instance.post[i]), h, &enc_cache[i]);
  }
  const Vector<Scalar> latent = h;

  detail::TreeBackprop<Scalar> bp(m, grad, latent);

  // root prediction
  typename SoftmaxHead<Scalar>::Cache root_cache;
  Scalar loglik = m.root_head.log_probs(latent, &root_cache)[root.token];
  m.root_head.backward_nll(root_cache, root.token, grad.root_head, bp.d_latent);

  if (!root.is_eob()) {
    typename detail::TreeBackprop<Scalar>::NodeWork work;
    const Vector<Scalar> zero = Vector<Scalar>::Zero(m.dims.hidden);
    loglik += bp.forward(root, zero, work);
    bp.backward(work);  // gradient w.r.t. the root's zero hidden is discarded
  } else if (!root.is_leaf()) {
    throw TreeError("likelihood: eob root with children");
  }

  // encoder backward from d latent
  Vector<Scalar> dh = bp.d_latent;
  for (std::size_t i = instance.post.size(); i-- > 0;) {
    Vector<Scalar> d_in = Vector<Scalar>::Zero(m.dims.embed);
    Vector<Scalar> d_prev = Vector<Scalar>::Zero(m.dims.hidden);
    m.encoder.backward(enc_cache[i], dh, grad.encoder, d_in, d_prev);
    grad.enc_embed.col(instance.post[i]) += d_in;
    dh = std::move(d_prev);
  }

  return -loglik;
}

}  // namespace treedec
