#include "aoci/agent/policy_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aoci::agent {

namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kLogFloor = std::log(kSquashFloor);

}  // namespace

int observation_width(const NetworkConfig& config) { return 3 * config.num_sensors() + 1; }

Eigen::VectorXd normalize_obs(const Observation& obs, const NetworkConfig& config) {
  const int n = config.num_sensors();
  Eigen::VectorXd out(3 * n + 1);
  for (int i = 0; i < n; ++i) {
    out[3 * i] = static_cast<double>(obs.since_delivery[i]) / config.g_max;
    out[3 * i + 1] = static_cast<double>(obs.scheduled_count[i]) / config.x_max;
    out[3 * i + 2] = obs.battery[i] ? static_cast<double>(*obs.battery[i]) / config.battery_cap[i] : -1.0;
  }
  out[3 * n] = static_cast<double>(obs.aoci) / config.aoci_max;
  return out;
}

double log_one_minus_tanh_sq(double u) {
  const double x = std::abs(u);
  return 2.0 * (std::numbers::ln2 - x - std::log1p(std::exp(-2.0 * x)));
}

SquashedSample sample_primitive(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_scale,
                                const Eigen::VectorXd& noise, const std::vector<double>& sizes) {
  const auto k = static_cast<Eigen::Index>(sizes.size());
  if (mu.size() != k || log_scale.size() != k || noise.size() != k) {
    throw std::invalid_argument("sample_primitive: vectors must have one entry per subspace");
  }
  Eigen::MatrixXd head(2 * k, 1);
  head << mu, log_scale;
  const auto batch = squash_batch(head, noise, sizes);
  SquashedSample out;
  out.squashed = batch.squashed.col(0);
  out.primitive = decode_squashed(out.squashed, sizes);
  out.log_prob = batch.log_prob[0];
  return out;
}

SquashedBatch squash_batch(const Eigen::MatrixXd& head, const Eigen::MatrixXd& noise,
                           const std::vector<double>& sizes) {
  const auto k = static_cast<Eigen::Index>(sizes.size());
  if (head.rows() != 2 * k || noise.rows() != k || noise.cols() != head.cols()) {
    throw std::invalid_argument("squash_batch: shape mismatch");
  }
  const Eigen::Index cols = head.cols();
  double size_term = 0.0;
  for (double s : sizes) size_term += std::log(s / 2.0);

  SquashedBatch out;
  out.squashed.resize(k, cols);
  out.scale_noise.resize(k, cols);
  out.log_prob.resize(cols);
  out.floored.resize(k, cols);
  out.clamped.resize(k, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    double lp = -size_term;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double raw = head(k + i, c);
      const double log_sigma = std::clamp(raw, kLogScaleMin, kLogScaleMax);
      out.clamped(i, c) = (raw < kLogScaleMin || raw > kLogScaleMax) ? 1.0 : 0.0;
      const double eps = noise(i, c);
      const double sn = std::exp(log_sigma) * eps;
      const double u = head(i, c) + sn;
      const double correction = log_one_minus_tanh_sq(u);
      out.floored(i, c) = correction < kLogFloor ? 1.0 : 0.0;
      out.squashed(i, c) = std::tanh(u);
      out.scale_noise(i, c) = sn;
      lp += -0.5 * eps * eps - log_sigma - kHalfLogTwoPi - std::max(correction, kLogFloor);
    }
    out.log_prob[c] = lp;
  }
  return out;
}

Eigen::MatrixXd squash_backward(const SquashedBatch& batch, const Eigen::RowVectorXd& dlogp,
                                const Eigen::MatrixXd& da) {
  const Eigen::Index k = batch.squashed.rows();
  const Eigen::Index cols = batch.squashed.cols();
  Eigen::MatrixXd dhead(2 * k, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const double a = batch.squashed(i, c);
      double du = da(i, c) * (1.0 - a * a);
      if (batch.floored(i, c) == 0.0) du += 2.0 * a * dlogp[c];
      dhead(i, c) = du;
      dhead(k + i, c) = batch.clamped(i, c) != 0.0 ? 0.0 : -dlogp[c] + du * batch.scale_noise(i, c);
    }
  }
  return dhead;
}

Eigen::VectorXd encode_primitive(const PrimitiveAction& primitive, const std::vector<double>& sizes) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(sizes.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i) a[static_cast<Eigen::Index>(i)] = 2.0 * primitive.values[i] / sizes[i] - 1.0;
  return a;
}

PrimitiveAction decode_squashed(const Eigen::VectorXd& squashed, const std::vector<double>& sizes) {
  PrimitiveAction p;
  p.values.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double v = (squashed[static_cast<Eigen::Index>(i)] + 1.0) / 2.0 * sizes[i];
    // tanh saturates to +-1 in floating point; keep the interval open.
    p.values[i] = std::clamp(v, std::nextafter(0.0, 1.0), std::nextafter(sizes[i], 0.0));
  }
  return p;
}

double compute_target(double reward, double q1, double q2, double log_prob, double alpha, double gamma) {
  return reward + gamma * (std::min(q1, q2) - alpha * log_prob);
}

}  // namespace aoci::agent
