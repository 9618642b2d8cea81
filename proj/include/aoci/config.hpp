#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aoci {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Importance sums are compared against thresholds with this slack so that
/// e.g. 0.4 + 0.6 meets a threshold of 1.0 regardless of rounding.
inline constexpr double kImportanceSlack = 1e-9;

/// Static description of the monitored network. Sensor indices are 0-based
/// and every per-sensor vector has one entry per sensor.
struct NetworkConfig {
  std::vector<std::vector<int>> sensor_sets;  // one disjoint list per CSP
  int channels = 2;                           // max scheduled sensors per set
  std::vector<double> failure_prob;
  std::vector<double> eh_prob;
  std::vector<int> battery_cap;
  int update_cost = 1;
  std::vector<double> importance;
  std::vector<double> threshold;  // one per CSP
  int g_max = 0;
  int x_max = 0;
  int aoci_max = 0;
  double discount = 0.99;

  int num_csps() const { return static_cast<int>(sensor_sets.size()); }
  int num_sensors() const { return static_cast<int>(importance.size()); }
  /// CSP index of every sensor.
  std::vector<int> csp_of_sensor() const;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const NetworkConfig& config);

/// Caps from the rule G_max = X_max = 2 * aoci_max = 4 * N * K.
void apply_default_caps(NetworkConfig& config);

/// The default evaluation scenario: `num_csps` CSPs with four sensors each,
/// failure probabilities {0.05, 0.10, 0.15, 0.20}, importances
/// {0.4, 0.6, 0.8, 1.0}, threshold 1.0, two channels, battery 20.
NetworkConfig default_network(int num_csps, double eh_prob = 0.2);

}  // namespace aoci
