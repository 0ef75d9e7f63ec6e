#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/random_instances.hpp"
#include "treedec/beam_search.hpp"
#include "treedec/toy_corpus.hpp"
#include "treedec/trainer.hpp"

using namespace treedec;
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

// toy pairs -> instances over their own full vocabulary
std::pair<std::vector<TrainingInstance>, Vocabulary> toy_instances(int pairs,
                                                                   std::uint64_t seed) {
  std::vector<RawPair> raw = make_toy_corpus(pairs, seed);
  std::vector<std::vector<std::string>> texts;
  for (const RawPair& p : raw) {
    texts.push_back(p.post);
    texts.push_back(p.response.tokens);
  }
  Vocabulary vocab = Vocabulary::build(texts, 1000);
  InstanceBuild build = make_instances(raw, vocab);
  return {std::move(build.instances), std::move(vocab)};
}

std::vector<TrainingInstance> clone_instances(const std::vector<TrainingInstance>& in) {
  std::vector<TrainingInstance> out;
  for (const TrainingInstance& i : in) out.push_back({i.post, clone(*i.tree)});
  return out;
}

}  // namespace

TEST_CASE("init_parameters stays in its interval and follows the seed") {
  Model a = init_parameters<double>(dims(20, 8, 12), 7);
  Model b = init_parameters<double>(dims(20, 8, 12), 7);
  Model c = init_parameters<double>(dims(20, 8, 12), 8);

  double lo = 1, hi = -1;
  bool same_seed_equal = true, diff_seed_equal = true;
  auto pa = a.parameters();
  auto pb = b.parameters();
  auto pc = c.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    lo = std::min(lo, pa[i].second.minCoeff());
    hi = std::max(hi, pa[i].second.maxCoeff());
    same_seed_equal = same_seed_equal && pa[i].second == pb[i].second;
    diff_seed_equal = diff_seed_equal && pa[i].second == pc[i].second;
  }
  CHECK(lo >= -0.01);
  CHECK(hi <= 0.01);
  CHECK(lo < -0.004);  // actually spread over the interval
  CHECK(hi > 0.004);
  CHECK(same_seed_equal);
  CHECK(!diff_seed_equal);
}

TEST_CASE("perplexity of the uniform model is the vocabulary size") {
  Model zero;
  zero.resize(dims(9, 2, 2));
  Rng rng(40);
  std::vector<TrainingInstance> instances;
  for (int i = 0; i < 5; ++i) instances.push_back(random_instance(9, 3, rng));
  CHECK(perplexity(instances, zero) == doctest::Approx(9.0).epsilon(1e-9));

  Model m = init_parameters<double>(dims(9, 2, 2), 41);
  CHECK(perplexity(instances, m) >= 1.0);
}

TEST_CASE("early stopping fires exactly on a patience-long increase run") {
  CHECK(!should_stop({10, 9, 8}, 2));
  CHECK(!should_stop({10, 9, 10}, 2));          // one increase
  CHECK(should_stop({10, 9, 10, 11}, 2));       // two in a row
  CHECK(!should_stop({10, 11, 9, 10}, 2));      // run broken
  CHECK(should_stop({5, 6, 7, 8, 9}, 4));
  CHECK(!should_stop({5, 6, 7, 8}, 4));         // needs patience+1 points
  CHECK(!should_stop({}, 1));
  CHECK(should_stop({3, 3.5}, 1));
  CHECK(!should_stop({3, 3}, 1));               // flat is not an increase
}

TEST_CASE("sgd with zero learning rate leaves parameters and loss unchanged") {
  auto [instances, vocab] = toy_instances(6, 17);
  TrainConfig config;
  config.dims = dims(static_cast<int>(vocab.size()), 4, 6);
  config.optimizer = "sgd";
  config.learning_rate = 0.0;
  config.max_epochs = 3;
  config.batch_size = 2;
  config.seed = 5;

  Model reference = init_parameters<double>(config.dims, config.seed);
  TrainResult<double> result = train<double>(instances, clone_instances(instances), config);
  REQUIRE(result.history.size() == 3);
  CHECK(result.history[0].train_nll == doctest::Approx(result.history[2].train_nll));
  auto pr = reference.parameters();
  auto pm = result.model.parameters();
  for (std::size_t i = 0; i < pr.size(); ++i) CHECK(pr[i].second == pm[i].second);
}

TEST_CASE("identical seeds give bitwise identical histories") {
  auto [instances, vocab] = toy_instances(8, 23);
  TrainConfig config;
  config.dims = dims(static_cast<int>(vocab.size()), 4, 6);
  config.max_epochs = 4;
  config.batch_size = 3;
  config.seed = 11;

  TrainResult<double> a = train<double>(instances, clone_instances(instances), config);
  TrainResult<double> b = train<double>(instances, clone_instances(instances), config);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_nll == b.history[i].train_nll);
    CHECK(a.history[i].val_perplexity == b.history[i].val_perplexity);
  }

  config.seed = 12;
  TrainResult<double> c = train<double>(instances, clone_instances(instances), config);
  CHECK(a.history[0].train_nll != c.history[0].train_nll);
}

TEST_CASE("adadelta overfits a small corpus") {
  auto [instances, vocab] = toy_instances(10, 29);
  TrainConfig config;
  config.dims = dims(static_cast<int>(vocab.size()), 8, 16);
  config.max_epochs = 150;
  config.batch_size = 4;
  config.patience = 150;  // never stop early against the training set
  config.seed = 3;

  TrainResult<double> result = train<double>(instances, clone_instances(instances), config);
  REQUIRE(!result.history.empty());
  const double first = result.history.front().train_nll;
  const double last = result.history.back().train_nll;
  CHECK(last < 0.1 * first);
  CHECK(perplexity(instances, result.model) < 1.5);
  CHECK(result.best_epoch > 0);
}

TEST_CASE("the returned model is the best-validation checkpoint") {
  auto [instances, vocab] = toy_instances(8, 31);
  // validating on a different slice makes perplexity rise once memorization
  // kicks in, so the best epoch lands strictly before the last
  auto [val, vocab2] = toy_instances(4, 77);
  TrainConfig config;
  config.dims = dims(static_cast<int>(vocab.size()), 6, 10);
  config.max_epochs = 120;
  config.batch_size = 4;
  config.patience = 6;
  config.seed = 13;

  TrainResult<double> result = train<double>(instances, val, config);
  REQUIRE(!result.history.empty());
  int best = 0;
  double best_ppl = 1e300;
  for (const EpochStats& e : result.history)
    if (e.val_perplexity < best_ppl) {
      best_ppl = e.val_perplexity;
      best = e.epoch;
    }
  CHECK(result.best_epoch == best);
  CHECK(perplexity(val, result.model) == doctest::Approx(best_ppl).epsilon(1e-9));
  // early stopping kicked in before the epoch cap
  CHECK(result.history.size() < 120);
}

TEST_CASE("exploding loss aborts with the last good checkpoint") {
  auto [instances, vocab] = toy_instances(6, 53);
  TrainConfig config;
  config.dims = dims(static_cast<int>(vocab.size()), 4, 6);
  config.optimizer = "sgd";
  // saturating activations keep huge-but-finite rates alive; an infinite
  // step turns zero-gradient entries into NaN immediately
  config.learning_rate = std::numeric_limits<double>::infinity();
  config.max_epochs = 5;
  config.batch_size = 2;
  config.seed = 9;

  TrainResult<double> result = train<double>(instances, clone_instances(instances), config);
  CHECK(result.nan_abort);
  CHECK(result.history.size() < 5);
  // the returned checkpoint predates the explosion
  for (auto& [name, block] : result.model.parameters()) CHECK(block.allFinite());
  CHECK(std::isfinite(perplexity(instances, result.model)));
}

TEST_CASE("config validation rejects nonsense") {
  TrainConfig config;
  config.dims = dims(5, 2, 2);
  config.batch_size = 0;
  CHECK_THROWS(config.validate());
  config.batch_size = 1;
  config.patience = 0;
  CHECK_THROWS(config.validate());
  config.patience = 1;
  config.optimizer = "adam";
  CHECK_THROWS(config.validate());
}
