#pragma once

#include <vector>

#include <Eigen/Core>

#include "aoci/actspace.hpp"
#include "aoci/config.hpp"
#include "aoci/env.hpp"

namespace aoci::agent {

inline constexpr double kLogScaleMin = -20.0;
inline constexpr double kLogScaleMax = 2.0;
/// Lower bound on 1 - tanh(u)^2 inside the log-density correction.
inline constexpr double kSquashFloor = 1e-6;

/// Per sensor (G / g_max, X / x_max, battery / E or -1 without a reading),
/// then aoci / aoci_max. Length 3N + 1.
Eigen::VectorXd normalize_obs(const Observation& obs, const NetworkConfig& config);
int observation_width(const NetworkConfig& config);

/// log(1 - tanh(u)^2) without cancellation.
double log_one_minus_tanh_sq(double u);

struct SquashedSample {
  PrimitiveAction primitive;
  Eigen::VectorXd squashed;  // tanh(u), in (-1, 1)
  double log_prob = 0.0;
};

/// u = mu + exp(clamp(log_scale)) * noise, a = tanh(u),
/// primitive_k = (a_k + 1) / 2 * size_k, with the change-of-variables density.
SquashedSample sample_primitive(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_scale,
                                const Eigen::VectorXd& noise, const std::vector<double>& sizes);

/// Column-wise sampling for a whole batch of actor outputs. `head` stacks the
/// K means over the K raw log-scales; `noise` is [K x cols].
struct SquashedBatch {
  Eigen::MatrixXd squashed;      // a, [K x cols]
  Eigen::MatrixXd scale_noise;   // sigma * noise
  Eigen::RowVectorXd log_prob;   // [1 x cols]
  Eigen::MatrixXd floored;       // 1 where the squash correction hit its floor
  Eigen::MatrixXd clamped;       // 1 where the raw log-scale was clamped
};

SquashedBatch squash_batch(const Eigen::MatrixXd& head, const Eigen::MatrixXd& noise,
                           const std::vector<double>& sizes);

/// Gradient with respect to `head` of sum_c (dlogp_c * log_prob_c + <da_c, a_c>).
Eigen::MatrixXd squash_backward(const SquashedBatch& batch, const Eigen::RowVectorXd& dlogp,
                                const Eigen::MatrixXd& da);

/// a = 2 * primitive / size - 1, the critic's encoding of a primitive action.
Eigen::VectorXd encode_primitive(const PrimitiveAction& primitive, const std::vector<double>& sizes);
PrimitiveAction decode_squashed(const Eigen::VectorXd& squashed, const std::vector<double>& sizes);

/// U + gamma * (min(q1, q2) - alpha * log_prob).
double compute_target(double reward, double q1, double q2, double log_prob, double alpha, double gamma);

}  // namespace aoci::agent
