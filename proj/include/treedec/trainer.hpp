#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "treedec/adadelta.hpp"
#include "treedec/likelihood.hpp"
#include "treedec/random_tree.hpp"

namespace treedec {

struct TrainConfig {
  int batch_size = 16;
  int max_epochs = 200;
  int patience = 4;  // stop after this many consecutive validation increases
  std::uint64_t seed = 42;
  ModelDims dims;
  std::string optimizer = "adadelta";  // or "sgd"
  double learning_rate = 0.1;          // sgd only
  double adadelta_rho = 0.95;
  double adadelta_eps = 1e-6;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (patience < 1) throw std::invalid_argument("train: patience must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (optimizer != "adadelta" && optimizer != "sgd")
      throw std::invalid_argument("train: unknown optimizer '" + optimizer + "'");
  }
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_nll = 0;
  double val_perplexity = 0;
};

template <class Scalar>
struct TrainResult {
  TreeDecoderModel<Scalar> model;  // best-validation checkpoint
  std::vector<EpochStats> history;
  int best_epoch = 0;
  bool nan_abort = false;
};

// Uniform initialization in [-0.01, 0.01], reproducible from the seed.
template <class Scalar>
TreeDecoderModel<Scalar> init_parameters(const ModelDims& dims, std::uint64_t seed) {
  TreeDecoderModel<Scalar> model;
  model.resize(dims);
  Rng rng(seed);
  for (auto& [name, block] : model.parameters())
    for (Eigen::Index i = 0; i < block.size(); ++i)
      block[i] = static_cast<Scalar>(uniform_real(rng, -0.01, 0.01));
  return model;
}

// exp of the mean negative log likelihood per predicted node; the root and
// every child slot (EOB outcomes included) count as one prediction each.
template <class Scalar>
double perplexity(const std::vector<TrainingInstance>& instances,
                  const TreeDecoderModel<Scalar>& model) {
  if (instances.empty()) throw std::invalid_argument("perplexity: empty instance set");
  double nll = 0;
  long predictions = 0;
  for (const TrainingInstance& instance : instances) {
    nll -= static_cast<double>(instance_log_likelihood(instance, model));
    predictions += prediction_count(*instance.tree, model.dims.arity);
  }
  return std::exp(nll / static_cast<double>(predictions));
}

// True when the last `patience` validation perplexities were each an
// increase over their predecessor.
inline bool should_stop(const std::vector<double>& val_perplexity, int patience) {
  if (static_cast<int>(val_perplexity.size()) <= patience) return false;
  int streak = 0;
  for (std::size_t i = val_perplexity.size(); i-- > 1;) {
    if (val_perplexity[i] > val_perplexity[i - 1])
      ++streak;
    else
      break;
  }
  return streak >= patience;
}

// Mini-batch maximum likelihood training. Instances are grouped by response
// word count; per-instance gradients within a batch are summed in index
// order and averaged, so runs are deterministic for a fixed seed. The
// returned model is the checkpoint with the best validation perplexity.
template <class Scalar>
TrainResult<Scalar> train(const std::vector<TrainingInstance>& instances,
                          const std::vector<TrainingInstance>& validation,
                          const TrainConfig& config) {
  config.validate();
  if (instances.empty() || validation.empty())
    throw std::invalid_argument("train: empty train or validation set");

  TrainResult<Scalar> result;
  TreeDecoderModel<Scalar> model = init_parameters<Scalar>(config.dims, config.seed);

  std::vector<int> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return word_count(*instances[a].tree) < word_count(*instances[b].tree);
  });

  AdaDelta<Scalar> adadelta(model, static_cast<Scalar>(config.adadelta_rho),
                            static_cast<Scalar>(config.adadelta_eps));
  Sgd<Scalar> sgd(static_cast<Scalar>(config.learning_rate));
  const bool use_adadelta = config.optimizer == "adadelta";

  result.model = model;
  double best_ppl = std::numeric_limits<double>::infinity();
  std::vector<double> ppl_history;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double epoch_nll = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      TreeDecoderModel<Scalar> grad = zeros_like(model);
      for (std::size_t i = start; i < stop; ++i)
        epoch_nll += static_cast<double>(nll_gradients(instances[order[i]], model, grad));
      for (auto& [name, block] : grad.parameters())
        block /= static_cast<Scalar>(stop - start);
      if (use_adadelta)
        adadelta.step(model, grad);
      else
        sgd.step(model, grad);
    }
    if (!std::isfinite(epoch_nll)) {
      result.nan_abort = true;
      break;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_nll = epoch_nll / static_cast<double>(instances.size());
    stats.val_perplexity = perplexity(validation, model);
    result.history.push_back(stats);
    ppl_history.push_back(stats.val_perplexity);

    if (stats.val_perplexity < best_ppl) {
      best_ppl = stats.val_perplexity;
      result.model = model;
      result.best_epoch = epoch;
    }
    if (should_stop(ppl_history, config.patience)) break;
  }
  return result;
}

}  // namespace treedec
