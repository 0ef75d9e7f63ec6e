#pragma once

#include "treedec/model.hpp"

namespace treedec {

// ADADELTA: AN ADAPTIVE LEARNING RATE METHOD (Zeiler, 2012), with the
// original defaults rho = 0.95 and eps = 1e-6. The running accumulators are
// model-shaped, iterated in lockstep with the parameter blocks.
template <class Scalar>
class AdaDelta {
 public:
  explicit AdaDelta(const TreeDecoderModel<Scalar>& model, Scalar rho = Scalar(0.95),
                    Scalar eps = Scalar(1e-6))
      : rho_(rho), eps_(eps), grad_sq_(zeros_like(model)), update_sq_(zeros_like(model)) {}

  void step(TreeDecoderModel<Scalar>& model, const TreeDecoderModel<Scalar>& grad) {
    auto params = model.parameters();
    auto grads = grad.parameters();
    auto gs = grad_sq_.parameters();
    auto us = update_sq_.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto g = grads[i].second.array();
      auto acc_g = gs[i].second.array();
      auto acc_u = us[i].second.array();
      acc_g = rho_ * acc_g + (Scalar(1) - rho_) * g.square();
      const auto delta =
          (-(acc_u + eps_).sqrt() / (acc_g + eps_).sqrt() * g).eval();
      acc_u = rho_ * acc_u + (Scalar(1) - rho_) * delta.square();
      params[i].second.array() += delta;
    }
  }

 private:
  Scalar rho_, eps_;
  TreeDecoderModel<Scalar> grad_sq_, update_sq_;
};

// Plain gradient descent; the degenerate learning rate 0 leaves parameters
// untouched, which the tests rely on.
template <class Scalar>
class Sgd {
 public:
  explicit Sgd(Scalar learning_rate) : lr_(learning_rate) {}

  void step(TreeDecoderModel<Scalar>& model, const TreeDecoderModel<Scalar>& grad) {
    auto params = model.parameters();
    auto grads = grad.parameters();
    for (std::size_t i = 0; i < params.size(); ++i)
      params[i].second -= lr_ * grads[i].second;
  }

 private:
  Scalar lr_;
};

}  // namespace treedec
