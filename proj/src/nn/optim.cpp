#include "aoci/nn/optim.hpp"

#include <stdexcept>

namespace aoci::nn {

RmsProp::RmsProp(Index size, double learning_rate, double decay, double epsilon)
    : accumulator_(Vector::Zero(size)), learning_rate_(learning_rate), decay_(decay), epsilon_(epsilon) {
  if (!(decay >= 0.0 && decay < 1.0)) throw std::invalid_argument("RmsProp: decay must lie in [0,1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("RmsProp: learning rate must be positive");
}

void RmsProp::step(Vector& params, const Vector& grads) {
  if (params.size() != accumulator_.size() || grads.size() != accumulator_.size()) {
    throw std::invalid_argument("RmsProp::step: size mismatch");
  }
  accumulator_.array() = decay_ * accumulator_.array() + (1.0 - decay_) * grads.array().square();
  params.array() -= learning_rate_ * grads.array() / (accumulator_.array().sqrt() + epsilon_);
}

void ema_blend(Vector& target, const Vector& source, double tau) {
  if (target.size() != source.size()) throw std::invalid_argument("ema_blend: size mismatch");
  if (tau == 1.0) {
    target = source;
    return;
  }
  target = tau * source + (1.0 - tau) * target;
}

}  // namespace aoci::nn
