#pragma once

#include "aoci/nn/recurrent_net.hpp"

namespace aoci::nn {

/// RMSprop over a flat parameter vector:
///   v <- decay * v + (1 - decay) * g^2
///   p <- p - lr * g / (sqrt(v) + epsilon)
class RmsProp {
 public:
  RmsProp(Index size, double learning_rate, double decay = 0.99, double epsilon = 1e-8);

  void step(Vector& params, const Vector& grads);

  const Vector& accumulator() const { return accumulator_; }
  Vector& accumulator() { return accumulator_; }
  double learning_rate() const { return learning_rate_; }
  double decay() const { return decay_; }
  double epsilon() const { return epsilon_; }

 private:
  Vector accumulator_;
  double learning_rate_;
  double decay_;
  double epsilon_;
};

/// target <- tau * source + (1 - tau) * target
void ema_blend(Vector& target, const Vector& source, double tau);

}  // namespace aoci::nn
