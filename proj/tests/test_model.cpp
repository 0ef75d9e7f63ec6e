#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support/grad_check.hpp"
#include "support/random_instances.hpp"
#include "support/tree_enum.hpp"
#include "treedec/checkpoint.hpp"
#include "treedec/likelihood.hpp"
#include "treedec/model.hpp"
#include "treedec/trainer.hpp"

using namespace treedec;
using treedec::testing::enumerate_padded_trees;
using treedec::testing::grad_check;
using treedec::testing::random_instance;

namespace {

using Model = TreeDecoderModel<double>;

ModelDims dims(int vocab, int embed, int hidden, int arity = 3) {
  ModelDims d;
  d.vocab = vocab;
  d.embed = embed;
  d.hidden = hidden;
  d.arity = arity;
  return d;
}

TernaryPtr word_with_eobs(TokenId token) {
  auto node = std::make_unique<TernaryNode>(token);
  for (int k = 0; k < 3; ++k) node->slot[k] = std::make_unique<TernaryNode>(kEob);
  return node;
}

}  // namespace

TEST_CASE("encode is deterministic and finite") {
  Model m = init_parameters<double>(dims(6, 3, 4), 1);
  const std::vector<TokenId> post{2, 5, 1, 3};
  Vector<double> a = encode(post, m);
  Vector<double> b = encode(post, m);
  CHECK(a == b);
  CHECK(a.allFinite());
  CHECK(a.size() == 4);

  CHECK_THROWS(encode({}, m));
  CHECK_THROWS(encode({6}, m));
  CHECK_THROWS(encode({-1}, m));
}

TEST_CASE("encode with zero parameters returns the zero latent") {
  Model m;
  m.resize(dims(4, 2, 2));
  // h' = z h + (1-z) tanh(0) stays 0 from h = 0
  CHECK(encode({1, 2, 3}, m).isZero(0));
}

TEST_CASE("one recurrent step matches a scalar hand computation") {
  Model m;
  m.resize(dims(3, 1, 1));
  m.enc_embed(0, 2) = 0.3;
  m.encoder.w_update(0, 0) = 0.2;
  m.encoder.u_update(0, 0) = 0.4;
  m.encoder.b_update(0) = 0.05;
  m.encoder.w_reset(0, 0) = -0.1;
  m.encoder.u_reset(0, 0) = 0.3;
  m.encoder.b_reset(0) = 0.02;
  m.encoder.w_cand(0, 0) = 0.5;
  m.encoder.u_cand(0, 0) = -0.2;
  m.encoder.b_cand(0) = 0.01;

  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double a = 0.3;
  const double z = sigmoid(0.2 * a + 0.05);
  const double r = sigmoid(-0.1 * a + 0.02);
  (void)r;  // h = 0 silences the reset path on the first step
  const double cand = std::tanh(0.5 * a + 0.01);
  const double h1 = (1.0 - z) * cand;
  CHECK(encode({2}, m)(0) == doctest::Approx(h1).epsilon(1e-12));

  // second step threads h1 through the gates
  m.enc_embed(0, 1) = -0.2;
  const double a2 = -0.2;
  const double z2 = sigmoid(0.2 * a2 + 0.4 * h1 + 0.05);
  const double r2 = sigmoid(-0.1 * a2 + 0.3 * h1 + 0.02);
  const double cand2 = std::tanh(0.5 * a2 + (-0.2) * (r2 * h1) + 0.01);
  const double h2 = z2 * h1 + (1.0 - z2) * cand2;
  CHECK(encode({2, 1}, m)(0) == doctest::Approx(h2).epsilon(1e-12));
}

TEST_CASE("root distribution is a proper distribution") {
  Model m = init_parameters<double>(dims(7, 3, 3), 2);
  Vector<double> latent = encode({2, 3}, m);
  Vector<double> p = root_distribution(latent, m);
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-6));

  Model zero;
  zero.resize(dims(7, 3, 3));
  const Vector<double> z3 = Vector<double>::Zero(3);
  Vector<double> uniform = root_distribution(z3, zero);
  for (int v = 0; v < 7; ++v) CHECK(uniform(v) == doctest::Approx(1.0 / 7).epsilon(1e-12));

  // pushing one output bias up strictly raises that token's probability
  const double before = root_distribution(latent, m)(4);
  m.root_head.b_out(4) += 0.5;
  CHECK(root_distribution(latent, m)(4) > before);
}

TEST_CASE("child states differ across positions unless cells share weights") {
  Model m = init_parameters<double>(dims(6, 3, 4), 3);
  Vector<double> latent = encode({2}, m);
  Vector<double> zero = Vector<double>::Zero(4);
  auto states = child_states<double>(3, zero, latent, m);
  REQUIRE(states.size() == 3);
  CHECK((states[0] - states[1]).cwiseAbs().maxCoeff() > 0);
  CHECK((states[1] - states[2]).cwiseAbs().maxCoeff() > 0);

  m.child_cell[1] = m.child_cell[0];
  auto tied = child_states<double>(3, zero, latent, m);
  CHECK(tied[0] == tied[1]);

  Vector<double> bad = Vector<double>::Zero(3);
  CHECK_THROWS(child_states<double>(3, bad, latent, m));
}

TEST_CASE("child distribution sums to one and feels its siblings") {
  Model m = init_parameters<double>(dims(6, 3, 4), 4);
  Vector<double> latent = encode({4}, m);
  Vector<double> h = child_states<double>(2, Vector<double>::Zero(4), latent, m)[1];

  Vector<double> p = child_distribution(2, latent, 2, h, {3}, m);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.minCoeff() >= 0.0);

  Vector<double> q = child_distribution(2, latent, 2, h, {5}, m);
  CHECK((p - q).cwiseAbs().maxCoeff() > 0);

  Model zero;
  zero.resize(dims(6, 3, 4));
  const Vector<double> z4 = Vector<double>::Zero(4);
  Vector<double> u = child_distribution(1, z4, 2, z4, {}, zero);
  for (int v = 0; v < 6; ++v) CHECK(u(v) == doctest::Approx(1.0 / 6).epsilon(1e-12));

  CHECK_THROWS(child_distribution(0, latent, 2, h, {}, m));
  CHECK_THROWS(child_distribution(4, latent, 2, h, {}, m));
}

TEST_CASE("single word tree under zero parameters scores 4 log(1/v)") {
  Model zero;
  zero.resize(dims(5, 2, 2));
  TernaryPtr tree = word_with_eobs(2);
  const Vector<double> z2 = Vector<double>::Zero(2);
  const double ll = tree_log_likelihood(*tree, z2, zero);
  CHECK(ll == doctest::Approx(4 * std::log(1.0 / 5)).epsilon(1e-12));
}

TEST_CASE("log likelihood is never positive and rejects unpadded trees") {
  Rng rng(77);
  Model m = init_parameters<double>(dims(8, 3, 4), 5);
  for (int i = 0; i < 30; ++i) {
    TrainingInstance instance = random_instance(8, 3, rng);
    CHECK(instance_log_likelihood(instance, m) <= 0.0);
  }

  TernaryNode bare(3);  // word without children
  const Vector<double> z4 = Vector<double>::Zero(4);
  CHECK_THROWS_AS(tree_log_likelihood(bare, z4, m), TreeError);
}

TEST_CASE("a depth-1 tree matches an independent straight-line recomputation") {
  const int V = 4, E = 2, H = 2;
  Model m = init_parameters<double>(dims(V, E, H), 5);
  const TokenId root = 2;
  TernaryPtr tree = word_with_eobs(root);
  const std::vector<TokenId> post{3, 1};
  const Vector<double> latent = encode(post, m);

  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  // gru step with explicit loops over the cell coefficients
  auto gru = [&](const GruCell<double>& cell, const std::vector<double>& in,
                 const std::vector<double>& h) {
    std::vector<double> z(H), r(H), out(H);
    for (int i = 0; i < H; ++i) {
      double az = cell.b_update(i), ar = cell.b_reset(i);
      for (std::size_t j = 0; j < in.size(); ++j) {
        az += cell.w_update(i, j) * in[j];
        ar += cell.w_reset(i, j) * in[j];
      }
      for (int j = 0; j < H; ++j) {
        az += cell.u_update(i, j) * h[j];
        ar += cell.u_reset(i, j) * h[j];
      }
      z[i] = sigmoid(az);
      r[i] = sigmoid(ar);
    }
    for (int i = 0; i < H; ++i) {
      double ac = cell.b_cand(i);
      for (std::size_t j = 0; j < in.size(); ++j) ac += cell.w_cand(i, j) * in[j];
      for (int j = 0; j < H; ++j) ac += cell.u_cand(i, j) * r[j] * h[j];
      out[i] = z[i] * h[i] + (1 - z[i]) * std::tanh(ac);
    }
    return out;
  };
  auto head_logp = [&](const SoftmaxHead<double>& head, const std::vector<double>& in,
                       TokenId target) {
    const int hidden = static_cast<int>(head.b_hidden.size());
    std::vector<double> u(hidden);
    for (int i = 0; i < hidden; ++i) {
      double a = head.b_hidden(i);
      for (std::size_t j = 0; j < in.size(); ++j) a += head.w_hidden(i, j) * in[j];
      u[i] = std::tanh(a);
    }
    std::vector<double> logits(V);
    double mx = -1e300;
    for (int v = 0; v < V; ++v) {
      double a = head.b_out(v);
      for (int j = 0; j < hidden; ++j) a += head.w_out(v, j) * u[j];
      logits[v] = a;
      mx = std::max(mx, a);
    }
    double lse = 0;
    for (int v = 0; v < V; ++v) lse += std::exp(logits[v] - mx);
    return logits[target] - (mx + std::log(lse));
  };

  // encoder by hand
  std::vector<double> h(H, 0.0);
  for (TokenId t : post) {
    std::vector<double> in(E);
    for (int i = 0; i < E; ++i) in[i] = m.enc_embed(i, t);
    h = gru(m.encoder, in, h);
  }
  std::vector<double> x = h;
  for (int i = 0; i < H; ++i) REQUIRE(latent(i) == doctest::Approx(x[i]).epsilon(1e-12));

  std::vector<double> root_in = x;
  double expected = head_logp(m.root_head, root_in, root);

  std::vector<double> cell_in(E + H);
  for (int i = 0; i < E; ++i) cell_in[i] = m.dec_embed(i, root);
  for (int i = 0; i < H; ++i) cell_in[E + i] = x[i];
  std::vector<TokenId> prev;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> hk = gru(m.child_cell[k], cell_in, std::vector<double>(H, 0.0));
    std::vector<double> head_in;
    for (int i = 0; i < H; ++i) head_in.push_back(x[i]);
    for (int i = 0; i < E; ++i) head_in.push_back(m.dec_embed(i, root));
    for (int i = 0; i < H; ++i) head_in.push_back(hk[i]);
    std::vector<double> sib(2 * E, 0.0);
    for (std::size_t j = 0; j < prev.size(); ++j)
      for (int i = 0; i < E; ++i) sib[j * E + i] = m.dec_embed(i, prev[j]);
    head_in.insert(head_in.end(), sib.begin(), sib.end());
    expected += head_logp(m.child_head[k], head_in, kEob);
    prev.push_back(kEob);
  }

  CHECK(tree_log_likelihood(*tree, latent, m) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("per prediction terms sum to the total in any order") {
  Rng rng(31);
  Model m = init_parameters<double>(dims(6, 3, 3), 6);
  for (int i = 0; i < 20; ++i) {
    TrainingInstance instance = random_instance(6, 3, rng);
    Vector<double> latent = encode(instance.post, m);
    std::vector<double> terms = log_prob_terms(*instance.tree, latent, m);
    CHECK(static_cast<int>(terms.size()) ==
          prediction_count(*instance.tree, m.dims.arity));
    const double total = tree_log_likelihood(*instance.tree, latent, m);
    double fwd = 0, rev = 0;
    for (double t : terms) fwd += t;
    for (std::size_t j = terms.size(); j-- > 0;) rev += terms[j];
    CHECK(fwd == doctest::Approx(total).epsilon(1e-12));
    CHECK(rev == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(2025);
  Model m = init_parameters<double>(dims(5, 3, 3), 7);
  std::vector<TrainingInstance> instances;
  for (int i = 0; i < 2; ++i) instances.push_back(random_instance(5, 3, rng, 4, 3));
  auto report = grad_check(instances, m);
  CAPTURE(report.worst_parameter);
  CHECK(report.max_rel_error <= 1e-4);
  CHECK(report.checked == static_cast<long>(m.parameter_count()));
}

TEST_CASE("gradients vanish exactly on the one-token degenerate case") {
  Model m = init_parameters<double>(dims(1, 2, 2), 9);
  TrainingInstance instance;
  instance.post = {0};
  instance.tree = std::make_unique<TernaryNode>(kEob);
  Model grad = zeros_like(m);
  const double nll = nll_gradients(instance, m, grad);
  CHECK(nll == doctest::Approx(0.0));
  for (auto& [name, block] : grad.parameters()) {
    CAPTURE(name);
    CHECK(block.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gradients are zero exactly on unused paths") {
  Model m = init_parameters<double>(dims(5, 3, 3), 10);

  // a bare eob tree exercises only the encoder and the root head
  TrainingInstance eob_only;
  eob_only.post = {2, 3};
  eob_only.tree = std::make_unique<TernaryNode>(kEob);
  Model grad = zeros_like(m);
  nll_gradients(eob_only, m, grad);
  for (int k = 0; k < 3; ++k) {
    GruCell<double>::visit(grad.child_cell[k], "cell", [](const std::string&, auto& b) {
      CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    });
    SoftmaxHead<double>::visit(grad.child_head[k], "head", [](const std::string&, auto& b) {
      CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    });
  }
  CHECK(grad.dec_embed.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad.root_head.w_out.cwiseAbs().maxCoeff() > 0.0);
  CHECK(grad.encoder.w_cand.cwiseAbs().maxCoeff() > 0.0);
  // unused encoder embedding columns stay zero
  CHECK(grad.enc_embed.col(4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad.enc_embed.col(2).cwiseAbs().maxCoeff() > 0.0);

  // one word node brings every child path into play
  TrainingInstance word;
  word.post = {2};
  word.tree = word_with_eobs(3);
  Model grad2 = zeros_like(m);
  nll_gradients(word, m, grad2);
  for (int k = 0; k < 3; ++k) {
    CHECK(grad2.child_cell[k].w_cand.cwiseAbs().maxCoeff() > 0.0);
    CHECK(grad2.child_head[k].w_out.cwiseAbs().maxCoeff() > 0.0);
  }
  CHECK(grad2.dec_embed.col(3).cwiseAbs().maxCoeff() > 0.0);
  CHECK(grad2.dec_embed.col(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("probability mass over depth-capped trees stays within one") {
  const int V = 3;
  Model m = init_parameters<double>(dims(V, 2, 2), 11);
  Vector<double> latent = encode({1, 2}, m);
  auto trees = enumerate_padded_trees(V, 2, 3);
  double mass = 0;
  for (const auto& tree : trees) mass += std::exp(tree_log_likelihood(*tree, latent, m));
  CHECK(mass > 0.0);
  CHECK(mass <= 1.0 + 1e-6);

  // biasing every head towards eob concentrates all mass below the cap
  for (int k = 0; k < 3; ++k) m.child_head[k].b_out(kEob) += 12.0;
  m.root_head.b_out(kEob) += 2.0;
  double biased = 0;
  for (const auto& tree : trees) biased += std::exp(tree_log_likelihood(*tree, latent, m));
  CHECK(biased == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(biased <= 1.0 + 1e-6);
}

TEST_CASE("checkpoints round-trip bit exactly") {
  Model m = init_parameters<double>(dims(9, 4, 5), 12);
  std::stringstream file;
  save_checkpoint(file, m, 0xfeedfacecafebeefull);
  auto loaded = load_checkpoint<double>(file);
  CHECK(loaded.vocab_hash == 0xfeedfacecafebeefull);
  CHECK(loaded.model.dims == m.dims);
  auto a = m.parameters();
  auto b = loaded.model.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second == b[i].second);
  }

  std::stringstream junk("not a checkpoint");
  CHECK_THROWS(load_checkpoint<double>(junk));
}
