#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "treedec/tree.hpp"

namespace treedec {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ModelDims {
  int vocab = 0;
  int embed = 32;
  int hidden = 64;
  int arity = 3;  // 3 for the canonical pipeline; 1 gives the chain reduction

  bool operator==(const ModelDims&) const = default;
};

template <class Scalar>
Vector<Scalar> log_softmax(const Vector<Scalar>& logits) {
  const Scalar m = logits.maxCoeff();
  const Scalar lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

// One-layer gated recurrent cell (update/reset gates, candidate state).
template <class Scalar>
struct GruCell {
  Matrix<Scalar> w_update, w_reset, w_cand;  // input weights
  Matrix<Scalar> u_update, u_reset, u_cand;  // state weights
  Vector<Scalar> b_update, b_reset, b_cand;

  void resize(int in, int out) {
    for (Matrix<Scalar>* w : {&w_update, &w_reset, &w_cand}) w->setZero(out, in);
    for (Matrix<Scalar>* u : {&u_update, &u_reset, &u_cand}) u->setZero(out, out);
    for (Vector<Scalar>* b : {&b_update, &b_reset, &b_cand}) b->setZero(out);
  }

  int input_size() const { return static_cast<int>(w_update.cols()); }
  int state_size() const { return static_cast<int>(w_update.rows()); }

  struct Cache {
    Vector<Scalar> in, h_prev, z, r, cand;
  };

  Vector<Scalar> step(const Vector<Scalar>& in, const Vector<Scalar>& h,
                      Cache* cache = nullptr) const {
    Vector<Scalar> z = sigmoid(w_update * in + u_update * h + b_update);
    Vector<Scalar> r = sigmoid(w_reset * in + u_reset * h + b_reset);
    Vector<Scalar> cand =
        (w_cand * in + u_cand * (r.cwiseProduct(h)) + b_cand).array().tanh().matrix();
    Vector<Scalar> h_next =
        z.cwiseProduct(h) + (Vector<Scalar>::Ones(z.size()) - z).cwiseProduct(cand);
    if (cache) {
      cache->in = in;
      cache->h_prev = h;
      cache->z = z;
      cache->r = r;
      cache->cand = cand;
    }
    return h_next;
  }

  // Accumulates parameter gradients and the gradients w.r.t. the cell input
  // and previous state for a given d(loss)/d(h_next).
  void backward(const Cache& c, const Vector<Scalar>& dh_next, GruCell& grad,
                Vector<Scalar>& d_in, Vector<Scalar>& d_h) const {
    const Vector<Scalar> ones = Vector<Scalar>::Ones(c.z.size());
    const Vector<Scalar> dz = dh_next.cwiseProduct(c.h_prev - c.cand);
    const Vector<Scalar> dcand = dh_next.cwiseProduct(ones - c.z);
    d_h += dh_next.cwiseProduct(c.z);

    const Vector<Scalar> dcand_pre =
        dcand.cwiseProduct(ones - c.cand.cwiseProduct(c.cand));
    grad.w_cand.noalias() += dcand_pre * c.in.transpose();
    grad.u_cand.noalias() += dcand_pre * c.r.cwiseProduct(c.h_prev).transpose();
    grad.b_cand += dcand_pre;
    const Vector<Scalar> drh = u_cand.transpose() * dcand_pre;
    const Vector<Scalar> dr = drh.cwiseProduct(c.h_prev);
    d_h += drh.cwiseProduct(c.r);
    d_in.noalias() += w_cand.transpose() * dcand_pre;

    const Vector<Scalar> dr_pre =
        dr.cwiseProduct(c.r).cwiseProduct(ones - c.r);
    grad.w_reset.noalias() += dr_pre * c.in.transpose();
    grad.u_reset.noalias() += dr_pre * c.h_prev.transpose();
    grad.b_reset += dr_pre;
    d_in.noalias() += w_reset.transpose() * dr_pre;
    d_h.noalias() += u_reset.transpose() * dr_pre;

    const Vector<Scalar> dz_pre = dz.cwiseProduct(c.z).cwiseProduct(ones - c.z);
    grad.w_update.noalias() += dz_pre * c.in.transpose();
    grad.u_update.noalias() += dz_pre * c.h_prev.transpose();
    grad.b_update += dz_pre;
    d_in.noalias() += w_update.transpose() * dz_pre;
    d_h.noalias() += u_update.transpose() * dz_pre;
  }

  template <class Self, class Fn>
  static void visit(Self& self, const std::string& prefix, Fn&& fn) {
    fn(prefix + ".w_update", self.w_update);
    fn(prefix + ".w_reset", self.w_reset);
    fn(prefix + ".w_cand", self.w_cand);
    fn(prefix + ".u_update", self.u_update);
    fn(prefix + ".u_reset", self.u_reset);
    fn(prefix + ".u_cand", self.u_cand);
    fn(prefix + ".b_update", self.b_update);
    fn(prefix + ".b_reset", self.b_reset);
    fn(prefix + ".b_cand", self.b_cand);
  }

 private:
  template <class Expr>
  static Vector<Scalar> sigmoid(const Expr& x) {
    return ((-x.array()).exp() + Scalar(1)).inverse().matrix();
  }
};

// Scoring head: one tanh layer followed by a projection onto the vocabulary.
template <class Scalar>
struct SoftmaxHead {
  Matrix<Scalar> w_hidden;
  Vector<Scalar> b_hidden;
  Matrix<Scalar> w_out;
  Vector<Scalar> b_out;

  void resize(int in, int hidden, int vocab) {
    w_hidden.setZero(hidden, in);
    b_hidden.setZero(hidden);
    w_out.setZero(vocab, hidden);
    b_out.setZero(vocab);
  }

  int input_size() const { return static_cast<int>(w_hidden.cols()); }

  struct Cache {
    Vector<Scalar> in, u, log_probs;
  };

  Vector<Scalar> log_probs(const Vector<Scalar>& in, Cache* cache = nullptr) const {
    Vector<Scalar> u = (w_hidden * in + b_hidden).array().tanh().matrix();
    Vector<Scalar> logp = log_softmax<Scalar>(w_out * u + b_out);
    if (cache) {
      cache->in = in;
      cache->u = u;
      cache->log_probs = logp;
    }
    return logp;
  }

  // Backward of -log p(target); accumulates parameter gradients, adds the
  // input gradient to d_in.
  void backward_nll(const Cache& c, TokenId target, SoftmaxHead& grad,
                    Vector<Scalar>& d_in) const {
    Vector<Scalar> dlogits = c.log_probs.array().exp().matrix();
    dlogits[target] -= Scalar(1);
    grad.w_out.noalias() += dlogits * c.u.transpose();
    grad.b_out += dlogits;
    const Vector<Scalar> du = w_out.transpose() * dlogits;
    const Vector<Scalar> du_pre =
        du.cwiseProduct((Scalar(1) - c.u.array().square()).matrix());
    grad.w_hidden.noalias() += du_pre * c.in.transpose();
    grad.b_hidden += du_pre;
    d_in.noalias() += w_hidden.transpose() * du_pre;
  }

  template <class Self, class Fn>
  static void visit(Self& self, const std::string& prefix, Fn&& fn) {
    fn(prefix + ".w_hidden", self.w_hidden);
    fn(prefix + ".b_hidden", self.b_hidden);
    fn(prefix + ".w_out", self.w_out);
    fn(prefix + ".b_out", self.b_out);
  }
};

// Encoder, K child-transition cells and the scoring heads. Word embeddings
// for the encoder and decoder sides are separate tables.
template <class Scalar>
struct TreeDecoderModel {
  ModelDims dims;
  Matrix<Scalar> enc_embed, dec_embed;          // embed x vocab
  GruCell<Scalar> encoder;                      // input: embed
  std::vector<GruCell<Scalar>> child_cell;      // input: embed + hidden
  SoftmaxHead<Scalar> root_head;                // input: hidden
  std::vector<SoftmaxHead<Scalar>> child_head;  // input: 2*hidden + embed + sib

  // width of the concatenated previous-sibling embeddings fed to each head,
  // zero-padded so the head arity is fixed
  int sibling_width() const { return (dims.arity - 1) * dims.embed; }

  void resize(const ModelDims& d) {
    if (d.vocab < 1) throw std::invalid_argument("model: vocabulary too small");
    if (d.arity < 1 || d.arity > 3)
      throw std::invalid_argument("model: arity must be 1..3");
    if (d.embed < 1 || d.hidden < 1) throw std::invalid_argument("model: bad dims");
    dims = d;
    enc_embed.setZero(d.embed, d.vocab);
    dec_embed.setZero(d.embed, d.vocab);
    encoder.resize(d.embed, d.hidden);
    child_cell.assign(d.arity, GruCell<Scalar>{});
    child_head.assign(d.arity, SoftmaxHead<Scalar>{});
    root_head.resize(d.hidden, d.hidden, d.vocab);
    for (int k = 0; k < d.arity; ++k) {
      child_cell[k].resize(d.embed + d.hidden, d.hidden);
      child_head[k].resize(2 * d.hidden + d.embed + sibling_width(), d.hidden, d.vocab);
    }
  }

  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("enc_embed", self.enc_embed);
    fn("dec_embed", self.dec_embed);
    GruCell<Scalar>::visit(self.encoder, "encoder", fn);
    for (std::size_t k = 0; k < self.child_cell.size(); ++k)
      GruCell<Scalar>::visit(self.child_cell[k], "cell" + std::to_string(k + 1), fn);
    SoftmaxHead<Scalar>::visit(self.root_head, "root_head", fn);
    for (std::size_t k = 0; k < self.child_head.size(); ++k)
      SoftmaxHead<Scalar>::visit(self.child_head[k], "head" + std::to_string(k + 1), fn);
  }

  // Flat named views over every parameter block, in a fixed order.
  std::vector<std::pair<std::string, Eigen::Map<Vector<Scalar>>>> parameters() {
    std::vector<std::pair<std::string, Eigen::Map<Vector<Scalar>>>> out;
    visit(*this, [&](const std::string& name, auto& block) {
      out.emplace_back(name, Eigen::Map<Vector<Scalar>>(block.data(), block.size()));
    });
    return out;
  }
  std::vector<std::pair<std::string, Eigen::Map<const Vector<Scalar>>>> parameters() const {
    std::vector<std::pair<std::string, Eigen::Map<const Vector<Scalar>>>> out;
    visit(*this, [&](const std::string& name, const auto& block) {
      out.emplace_back(name, Eigen::Map<const Vector<Scalar>>(block.data(), block.size()));
    });
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit(*this, [&](const std::string&, const auto& block) { n += block.size(); });
    return n;
  }
};

template <class Scalar>
TreeDecoderModel<Scalar> zeros_like(const TreeDecoderModel<Scalar>& model) {
  TreeDecoderModel<Scalar> z;
  z.resize(model.dims);
  return z;
}

template <class Scalar>
void check_token(const TreeDecoderModel<Scalar>& m, TokenId t) {
  if (t < 0 || t >= m.dims.vocab)
    throw std::out_of_range("token id " + std::to_string(t) + " outside vocabulary of " +
                            std::to_string(m.dims.vocab));
}

// Latent vector for a post: last hidden state of the encoder cell run over
// the post embeddings. Deterministic.
template <class Scalar>
Vector<Scalar> encode(const std::vector<TokenId>& post, const TreeDecoderModel<Scalar>& m) {
  if (post.empty()) throw std::invalid_argument("encode: empty post");
  Vector<Scalar> h = Vector<Scalar>::Zero(m.dims.hidden);
  for (TokenId t : post) {
    check_token(m, t);
    h = m.encoder.step(m.enc_embed.col(t), h);
  }
  return h;
}

// The K per-position hidden states for the children of a node: h_k depends
// on the parent token, the hidden state fed to the parent, and the latent.
template <class Scalar>
std::vector<Vector<Scalar>> child_states(TokenId parent, const Vector<Scalar>& parent_hidden,
                                         const Vector<Scalar>& latent,
                                         const TreeDecoderModel<Scalar>& m) {
  check_token(m, parent);
  if (parent_hidden.size() != m.dims.hidden || latent.size() != m.dims.hidden)
    throw std::invalid_argument("child_states: dimension mismatch");
  Vector<Scalar> in(m.dims.embed + m.dims.hidden);
  in << m.dec_embed.col(parent), latent;
  std::vector<Vector<Scalar>> states;
  states.reserve(m.child_cell.size());
  for (const auto& cell : m.child_cell) states.push_back(cell.step(in, parent_hidden));
  return states;
}

// Input to the k-th child head: latent, parent embedding, h_k, and the
// embeddings of the already generated siblings zero-padded to fixed width.
template <class Scalar>
Vector<Scalar> child_head_input(const TreeDecoderModel<Scalar>& m, const Vector<Scalar>& latent,
                                TokenId parent, const Vector<Scalar>& h_k,
                                const std::vector<TokenId>& previous_children) {
  Vector<Scalar> sib = Vector<Scalar>::Zero(m.sibling_width());
  if (static_cast<int>(previous_children.size()) >= m.dims.arity)
    throw std::invalid_argument("child_head_input: too many previous children");
  for (std::size_t j = 0; j < previous_children.size(); ++j) {
    check_token(m, previous_children[j]);
    sib.segment(static_cast<int>(j) * m.dims.embed, m.dims.embed) =
        m.dec_embed.col(previous_children[j]);
  }
  Vector<Scalar> in(2 * m.dims.hidden + m.dims.embed + m.sibling_width());
  in << latent, m.dec_embed.col(parent), h_k, sib;
  return in;
}

template <class Scalar>
Vector<Scalar> root_distribution(const Vector<Scalar>& latent,
                                 const TreeDecoderModel<Scalar>& m) {
  return m.root_head.log_probs(latent).array().exp().matrix();
}

// Distribution over the k-th child (1-based k).
template <class Scalar>
Vector<Scalar> child_distribution(int k, const Vector<Scalar>& latent, TokenId parent,
                                  const Vector<Scalar>& h_k,
                                  const std::vector<TokenId>& previous_children,
                                  const TreeDecoderModel<Scalar>& m) {
  if (k < 1 || k > m.dims.arity)
    throw std::invalid_argument("child_distribution: k outside 1..K");
  check_token(m, parent);
  const Vector<Scalar> in = child_head_input(m, latent, parent, h_k, previous_children);
  return m.child_head[k - 1].log_probs(in).array().exp().matrix();
}

}  // namespace treedec
