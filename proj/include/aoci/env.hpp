#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "aoci/actspace.hpp"
#include "aoci/config.hpp"
#include "aoci/rng.hpp"

namespace aoci {

/// True POMDP state at the start of a slot.
struct EnvState {
  std::vector<int> since_delivery;   // G_n
  std::vector<int> scheduled_count;  // X_n
  std::vector<int> battery;          // e_n
  int aoci = 0;

  bool operator==(const EnvState&) const = default;
};

/// What the fusion center sees. A battery reading is present only for sensors
/// that delivered in the previous slot (std::nullopt is the sentinel).
struct Observation {
  std::vector<int> since_delivery;
  std::vector<int> scheduled_count;
  std::vector<std::optional<int>> battery;
  int aoci = 0;

  bool operator==(const Observation&) const = default;
};

struct StepOutcome {
  int reward = 0;
  Observation next_obs;
  Indicators delivered;
  Indicators activated;
  std::vector<int> residual;  // post-activation energy, before arrivals
  Indicators csp_met;
  bool integrated = false;
  std::vector<int> min_battery;  // per set, at the start of the next slot

  bool operator==(const StepOutcome&) const = default;
};

class InvalidAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Activation {
  bool activated = false;
  int residual = 0;
};

/// Energy causality: a scheduled sensor runs only with at least one unit.
Activation activation(bool scheduled, int battery);

struct ImportanceResult {
  double value = 0.0;
  bool met = false;
};

/// `delivered` is indexed in the order of config.sensor_sets[csp].
ImportanceResult aggregate_importance(const Indicators& delivered, const NetworkConfig& config, int csp);

int evolve_aoci(int aoci, bool integrated, int aoci_max);

int battery_transition(int residual, bool arrival, int capacity);

std::pair<EnvState, Observation> reset(const NetworkConfig& config);

/// Pure slot dynamics given all random draws. `success` is consulted only for
/// activated sensors.
std::pair<EnvState, StepOutcome> transition(const EnvState& state, const ValidAction& action,
                                            const Indicators& success, const Indicators& arrivals,
                                            const NetworkConfig& config);

/// Minimum battery of every sensor set.
std::vector<int> min_battery_per_set(const std::vector<int>& battery, const NetworkConfig& config);

/// Seeded environment. Per slot it draws N channel successes with
/// probability 1 - p_n, then N energy arrivals with probability rho_n, both
/// in ascending sensor order, and delegates to transition().
class Environment {
 public:
  Environment(NetworkConfig config, std::uint64_t seed);

  Observation reset();
  StepOutcome step(const ValidAction& action);

  const EnvState& state() const { return state_; }
  const NetworkConfig& config() const { return config_; }

 private:
  NetworkConfig config_;
  Rng rng_;
  EnvState state_;
};

}  // namespace aoci
