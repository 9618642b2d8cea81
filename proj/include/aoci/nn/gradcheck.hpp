#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aoci/nn/recurrent_net.hpp"

namespace aoci::nn {

struct BlockError {
  std::string block;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  double tolerance = 0.0;
  double max_rel_error = 0.0;
  std::string worst;  // e.g. "lstm.weight[forget] (3, 7)"
  std::vector<BlockError> blocks;
  Index checked = 0;
  bool passed = true;
};

/// Relative error used throughout: |a - n| / max(|a| + |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Human-readable location of flat parameter `index`; rows of LSTM blocks
/// are tagged with their gate.
std::string describe_parameter(const std::vector<ParamBlock>& blocks, Index index);

/// Compares `analytic()` against central differences of `loss()` for every
/// entry of `params` (perturbed in place and restored).
GradCheckReport check_gradients(Vector& params, const std::vector<ParamBlock>& blocks,
                                const std::function<double()>& loss, const std::function<Vector()>& analytic,
                                double tolerance, double step = 1e-5);

struct GradCheckOptions {
  Index steps = 5;
  Index batch = 2;
  int trials = 2;
  double step = 1e-5;
  /// Applied to the analytic gradient before comparison (mutation testing).
  std::function<void(Vector&)> corrupt;
};

/// Random inputs and random linear losses over the outputs of `net`; the
/// worst result over all trials is reported.
GradCheckReport grad_check(RecurrentNet& net, double tolerance, Rng& rng, const GradCheckOptions& options = {});

}  // namespace aoci::nn
