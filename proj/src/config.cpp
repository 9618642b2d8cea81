#include "aoci/config.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace aoci {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError("invalid network config: " + what); }

void require_size(const char* field, std::size_t got, std::size_t want) {
  if (got != want) {
    std::ostringstream os;
    os << field << " has " << got << " entries, expected " << want;
    fail(os.str());
  }
}

}  // namespace

std::vector<int> NetworkConfig::csp_of_sensor() const {
  std::vector<int> owner(static_cast<std::size_t>(num_sensors()), -1);
  for (int k = 0; k < num_csps(); ++k) {
    for (int n : sensor_sets[static_cast<std::size_t>(k)]) owner[static_cast<std::size_t>(n)] = k;
  }
  return owner;
}

void validate(const NetworkConfig& config) {
  const int num_csps = config.num_csps();
  const int num_sensors = config.num_sensors();
  if (num_csps < 1) fail("K must be positive");
  if (num_sensors < 1) fail("importance must list at least one sensor");

  const auto n = static_cast<std::size_t>(num_sensors);
  require_size("failure_prob", config.failure_prob.size(), n);
  require_size("eh_prob", config.eh_prob.size(), n);
  require_size("battery_cap", config.battery_cap.size(), n);
  require_size("threshold", config.threshold.size(), static_cast<std::size_t>(num_csps));

  std::vector<int> seen(n, 0);
  for (int k = 0; k < num_csps; ++k) {
    const auto& set = config.sensor_sets[static_cast<std::size_t>(k)];
    if (set.empty()) fail("sensor_sets[" + std::to_string(k) + "] is empty");
    for (int s : set) {
      if (s < 0 || s >= num_sensors) fail("sensor_sets contains out-of-range index " + std::to_string(s));
      if (seen[static_cast<std::size_t>(s)]++ != 0) fail("sensor " + std::to_string(s) + " appears in two sets");
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s] == 0) fail("sensor " + std::to_string(s) + " belongs to no set");
  }

  if (config.channels < 1) fail("channels (M) must be positive");
  if (config.update_cost != 1) fail("update_cost must be 1");
  for (std::size_t s = 0; s < n; ++s) {
    const std::string tag = "[" + std::to_string(s) + "]";
    if (!(config.failure_prob[s] >= 0.0 && config.failure_prob[s] <= 1.0)) fail("failure_prob" + tag + " outside [0,1]");
    if (!(config.eh_prob[s] >= 0.0 && config.eh_prob[s] <= 1.0)) fail("eh_prob" + tag + " outside [0,1]");
    if (config.battery_cap[s] < 1) fail("battery_cap" + tag + " must be >= 1");
    if (!(config.importance[s] > 0.0)) fail("importance" + tag + " must be positive");
  }

  for (int k = 0; k < num_csps; ++k) {
    const auto& set = config.sensor_sets[static_cast<std::size_t>(k)];
    const std::string tag = "[" + std::to_string(k) + "]";
    if (static_cast<int>(set.size()) < config.channels) fail("channels exceeds size of sensor_sets" + tag);
    const double threshold = config.threshold[static_cast<std::size_t>(k)];
    if (!(threshold > 0.0)) fail("threshold" + tag + " must be positive");
    // The best subset of size <= M is the M most important sensors.
    std::vector<double> weights;
    for (int s : set) weights.push_back(config.importance[static_cast<std::size_t>(s)]);
    std::sort(weights.begin(), weights.end(), std::greater<>());
    const double best = std::accumulate(weights.begin(), weights.begin() + config.channels, 0.0);
    if (best < threshold - kImportanceSlack) fail("no subset of sensor_sets" + tag + " can reach threshold");
  }

  if (config.g_max < 1 || config.x_max < 1 || config.aoci_max < 1) fail("g_max, x_max and aoci_max must be positive");
  if (!(config.discount >= 0.0 && config.discount < 1.0)) fail("discount must lie in [0,1)");
}

void apply_default_caps(NetworkConfig& config) {
  const int cap = 4 * config.num_sensors() * config.num_csps();
  config.g_max = cap;
  config.x_max = cap;
  config.aoci_max = cap / 2;
}

NetworkConfig default_network(int num_csps, double eh_prob) {
  if (num_csps < 1) throw ConfigError("invalid network config: K must be positive");
  static constexpr double kFailure[] = {0.05, 0.10, 0.15, 0.20};
  static constexpr double kImportance[] = {0.4, 0.6, 0.8, 1.0};

  NetworkConfig config;
  config.channels = 2;
  for (int k = 0; k < num_csps; ++k) {
    std::vector<int> set;
    for (int j = 0; j < 4; ++j) {
      set.push_back(k * 4 + j);
      config.failure_prob.push_back(kFailure[j]);
      config.importance.push_back(kImportance[j]);
      config.eh_prob.push_back(eh_prob);
      config.battery_cap.push_back(20);
    }
    config.sensor_sets.push_back(std::move(set));
    config.threshold.push_back(1.0);
  }
  config.discount = 0.99;
  apply_default_caps(config);
  return config;
}

}  // namespace aoci
