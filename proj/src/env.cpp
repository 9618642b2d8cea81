#include "aoci/env.hpp"

#include <algorithm>
#include <limits>

namespace aoci {

Activation activation(bool scheduled, int battery) {
  const bool on = scheduled && battery >= 1;
  return {on, battery - (on ? 1 : 0)};
}

ImportanceResult aggregate_importance(const Indicators& delivered, const NetworkConfig& config, int csp) {
  const auto& set = config.sensor_sets.at(static_cast<std::size_t>(csp));
  if (delivered.size() != set.size()) throw std::invalid_argument("aggregate_importance: indicator count mismatch");
  double value = 0.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (delivered[j] != 0) value += config.importance[static_cast<std::size_t>(set[j])];
  }
  return {value, value >= config.threshold[static_cast<std::size_t>(csp)] - kImportanceSlack};
}

int evolve_aoci(int aoci, bool integrated, int aoci_max) {
  if (integrated) return 1;
  return std::min(aoci + 1, aoci_max);
}

int battery_transition(int residual, bool arrival, int capacity) {
  return std::min(residual + (arrival ? 1 : 0), capacity);
}

std::pair<EnvState, Observation> reset(const NetworkConfig& config) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.num_sensors());
  EnvState state{std::vector<int>(n, 0), std::vector<int>(n, 0), config.battery_cap, 0};
  Observation obs{std::vector<int>(n, 0), std::vector<int>(n, 0), {}, 0};
  obs.battery.assign(config.battery_cap.begin(), config.battery_cap.end());
  return {std::move(state), std::move(obs)};
}

std::vector<int> min_battery_per_set(const std::vector<int>& battery, const NetworkConfig& config) {
  std::vector<int> out;
  out.reserve(config.sensor_sets.size());
  for (const auto& set : config.sensor_sets) {
    int lowest = std::numeric_limits<int>::max();
    for (int s : set) lowest = std::min(lowest, battery[static_cast<std::size_t>(s)]);
    out.push_back(lowest);
  }
  return out;
}

std::pair<EnvState, StepOutcome> transition(const EnvState& state, const ValidAction& action,
                                            const Indicators& success, const Indicators& arrivals,
                                            const NetworkConfig& config) {
  const auto n = static_cast<std::size_t>(config.num_sensors());
  if (!validate_action(action, config)) throw InvalidAction("transition: action violates channel or threshold rule");
  if (success.size() != n || arrivals.size() != n) throw std::invalid_argument("transition: draw vectors must cover every sensor");

  StepOutcome out;
  out.delivered.assign(n, 0);
  out.activated.assign(n, 0);
  out.residual.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto act = activation(action.schedule[s] != 0, state.battery[s]);
    out.activated[s] = act.activated ? 1 : 0;
    out.residual[s] = act.residual;
    out.delivered[s] = (act.activated && success[s] != 0) ? 1 : 0;
  }

  out.integrated = true;
  for (int k = 0; k < config.num_csps(); ++k) {
    const auto& set = config.sensor_sets[static_cast<std::size_t>(k)];
    Indicators local(set.size());
    for (std::size_t j = 0; j < set.size(); ++j) local[j] = out.delivered[static_cast<std::size_t>(set[j])];
    const bool met = aggregate_importance(local, config, k).met;
    out.csp_met.push_back(met ? 1 : 0);
    out.integrated = out.integrated && met;
  }

  EnvState next;
  next.aoci = evolve_aoci(state.aoci, out.integrated, config.aoci_max);
  next.battery.resize(n);
  next.since_delivery.resize(n);
  next.scheduled_count.resize(n);
  out.next_obs.battery.assign(n, std::nullopt);
  for (std::size_t s = 0; s < n; ++s) {
    next.battery[s] = battery_transition(out.residual[s], arrivals[s] != 0, config.battery_cap[s]);
    if (out.delivered[s] != 0) {
      next.since_delivery[s] = 0;
      next.scheduled_count[s] = 0;
      out.next_obs.battery[s] = out.residual[s];
    } else {
      next.since_delivery[s] = std::min(state.since_delivery[s] + 1, config.g_max);
      next.scheduled_count[s] = std::min(state.scheduled_count[s] + (action.schedule[s] != 0 ? 1 : 0), config.x_max);
    }
  }
  out.next_obs.since_delivery = next.since_delivery;
  out.next_obs.scheduled_count = next.scheduled_count;
  out.next_obs.aoci = next.aoci;
  out.reward = -next.aoci;
  out.min_battery = min_battery_per_set(next.battery, config);
  return {std::move(next), std::move(out)};
}

Environment::Environment(NetworkConfig config, std::uint64_t seed) : config_(std::move(config)), rng_(seed) {
  state_ = aoci::reset(config_).first;
}

Observation Environment::reset() {
  auto [state, obs] = aoci::reset(config_);
  state_ = std::move(state);
  return obs;
}

StepOutcome Environment::step(const ValidAction& action) {
  const auto n = static_cast<std::size_t>(config_.num_sensors());
  Indicators success(n), arrivals(n);
  for (std::size_t s = 0; s < n; ++s) success[s] = bernoulli(rng_, 1.0 - config_.failure_prob[s]) ? 1 : 0;
  for (std::size_t s = 0; s < n; ++s) arrivals[s] = bernoulli(rng_, config_.eh_prob[s]) ? 1 : 0;
  auto [next, outcome] = transition(state_, action, success, arrivals, config_);
  state_ = std::move(next);
  return outcome;
}

}  // namespace aoci
