#include "aoci/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aoci::nn {

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), floor);
}

std::string describe_parameter(const std::vector<ParamBlock>& blocks, Index index) {
  static const char* kGates[] = {"input", "forget", "candidate", "output"};
  for (const auto& block : blocks) {
    if (index < block.offset || index >= block.offset + block.count()) continue;
    const Index local = index - block.offset;
    const Index row = local % block.rows;
    const Index col = local / block.rows;
    std::ostringstream os;
    os << block.name;
    if (block.name.rfind("lstm.", 0) == 0 && block.rows % 4 == 0) os << '[' << kGates[row / (block.rows / 4)] << ']';
    os << " (" << row << ", " << col << ')';
    return os.str();
  }
  return "parameter " + std::to_string(index);
}

GradCheckReport check_gradients(Vector& params, const std::vector<ParamBlock>& blocks,
                                const std::function<double()>& loss, const std::function<Vector()>& analytic,
                                double tolerance, double step) {
  GradCheckReport report;
  report.tolerance = tolerance;
  const Vector grad = analytic();
  if (grad.size() != params.size()) throw std::invalid_argument("check_gradients: gradient size mismatch");

  for (const auto& block : blocks) {
    BlockError be{block.name, 0.0};
    for (Index i = block.offset; i < block.offset + block.count(); ++i) {
      const double saved = params[i];
      params[i] = saved + step;
      const double up = loss();
      params[i] = saved - step;
      const double down = loss();
      params[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = relative_error(grad[i], numeric);
      be.max_rel_error = std::max(be.max_rel_error, err);
      if (report.worst.empty() || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst = describe_parameter(blocks, i);
      }
      ++report.checked;
    }
    report.blocks.push_back(be);
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

GradCheckReport grad_check(RecurrentNet& net, double tolerance, Rng& rng, const GradCheckOptions& options) {
  const NetShape& shape = net.shape();
  const Index cols = options.steps * options.batch;
  GradCheckReport worst;
  worst.tolerance = tolerance;
  for (int trial = 0; trial < options.trials; ++trial) {
    Matrix inputs(shape.input, cols);
    Matrix direction(shape.output, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < shape.input; ++i) inputs(i, j) = standard_normal(rng);
      for (Index i = 0; i < shape.output; ++i) direction(i, j) = standard_normal(rng) / std::sqrt(static_cast<double>(cols));
    }
    auto loss = [&] { return net.forward_seq(inputs, options.batch).cwiseProduct(direction).sum(); };
    auto analytic = [&] {
      SequenceCache cache;
      net.forward_seq(inputs, options.batch, nullptr, &cache);
      Vector grads;
      net.backward_seq(cache, direction, &grads, nullptr);
      if (options.corrupt) options.corrupt(grads);
      return grads;
    };
    auto report = check_gradients(net.params(), net.blocks(), loss, analytic, tolerance, options.step);
    if (trial == 0 || report.max_rel_error > worst.max_rel_error) worst = std::move(report);
  }
  return worst;
}

}  // namespace aoci::nn
