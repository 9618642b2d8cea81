#include "aoci/actspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aoci {

bool ValidAction::is_silent() const {
  return std::all_of(schedule.begin(), schedule.end(), [](std::uint8_t a) { return a == 0; });
}

std::vector<std::size_t> ActionSpaces::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(subspaces.size());
  for (const auto& sub : subspaces) out.push_back(sub.size());
  return out;
}

namespace {

// Advances `combo` (ascending positions in [0, n)) to the next combination of
// the same size in lexicographic order; false when exhausted.
bool next_combination(std::vector<int>& combo, int n) {
  const int r = static_cast<int>(combo.size());
  int i = r - 1;
  while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - r + i) --i;
  if (i < 0) return false;
  ++combo[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < r; ++j) combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

Subspace enumerate_subspace(int csp, std::span<const int> sensors, std::span<const double> importances,
                            int channels, double threshold) {
  if (sensors.empty()) throw std::invalid_argument("enumerate_subspace: empty sensor set");
  if (sensors.size() != importances.size()) throw std::invalid_argument("enumerate_subspace: size mismatch");
  if (channels < 1) throw std::invalid_argument("enumerate_subspace: channels must be >= 1");

  const int n = static_cast<int>(sensors.size());
  Subspace sub;
  sub.csp = csp;
  sub.sensors.assign(sensors.begin(), sensors.end());
  sub.elements.emplace_back(sensors.size(), 0);

  for (int r = 1; r <= std::min(channels, n); ++r) {
    std::vector<int> combo(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) combo[static_cast<std::size_t>(i)] = i;
    do {
      double total = 0.0;
      for (int pos : combo) total += importances[static_cast<std::size_t>(pos)];
      if (total >= threshold - kImportanceSlack) {
        Indicators element(sensors.size(), 0);
        for (int pos : combo) element[static_cast<std::size_t>(pos)] = 1;
        sub.elements.push_back(std::move(element));
      }
    } while (next_combination(combo, n));
  }

  if (sub.elements.size() == 1) {
    std::ostringstream os;
    os << "CSP " << csp << " has no subset of at most " << channels << " sensors reaching threshold " << threshold;
    throw NoQualifiedSubset(os.str());
  }
  return sub;
}

ActionSpaces build_action_spaces(const NetworkConfig& config) {
  validate(config);
  ActionSpaces spaces;
  spaces.num_sensors = config.num_sensors();
  std::uint64_t product = 1;
  for (int k = 0; k < config.num_csps(); ++k) {
    auto set = config.sensor_sets[static_cast<std::size_t>(k)];
    std::sort(set.begin(), set.end());
    std::vector<double> weights;
    for (int s : set) weights.push_back(config.importance[static_cast<std::size_t>(s)]);
    spaces.subspaces.push_back(
        enumerate_subspace(k, set, weights, config.channels, config.threshold[static_cast<std::size_t>(k)]));
    const std::uint64_t factor = spaces.subspaces.back().size() - 1;
    if (product > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw ActionSpaceTooLarge("valid-action count overflows 64 bits");
    }
    product *= factor;
  }
  spaces.total_valid = product + 1;
  return spaces;
}

ProtoAction discretize(const PrimitiveAction& primitive, const ActionSpaces& spaces) {
  if (primitive.values.size() != spaces.subspaces.size()) {
    throw std::invalid_argument("discretize: primitive action has wrong dimension");
  }
  ProtoAction proto;
  proto.indices.reserve(primitive.values.size());
  for (std::size_t k = 0; k < primitive.values.size(); ++k) {
    const double top = static_cast<double>(spaces.subspaces[k].size() - 1);
    const double v = std::clamp(std::floor(primitive.values[k]), 0.0, top);
    proto.indices.push_back(static_cast<std::size_t>(v));
  }
  return proto;
}

ValidAction silent_action(int num_sensors) {
  return ValidAction{Indicators(static_cast<std::size_t>(num_sensors), 0)};
}

ValidAction map_to_valid(const ProtoAction& proto, const ActionSpaces& spaces) {
  if (proto.indices.size() != spaces.subspaces.size()) {
    throw std::invalid_argument("map_to_valid: proto-action has wrong dimension");
  }
  ValidAction action = silent_action(spaces.num_sensors);
  for (std::size_t k = 0; k < proto.indices.size(); ++k) {
    if (proto.indices[k] >= spaces.subspaces[k].size()) throw std::out_of_range("map_to_valid: index out of range");
    if (proto.indices[k] == 0) return silent_action(spaces.num_sensors);
  }
  for (std::size_t k = 0; k < proto.indices.size(); ++k) {
    const auto& sub = spaces.subspaces[k];
    const auto& element = sub.elements[proto.indices[k]];
    for (std::size_t j = 0; j < sub.sensors.size(); ++j) {
      action.schedule[static_cast<std::size_t>(sub.sensors[j])] = element[j];
    }
  }
  return action;
}

bool validate_action(const ValidAction& action, const NetworkConfig& config) {
  if (static_cast<int>(action.schedule.size()) != config.num_sensors()) return false;
  if (std::any_of(action.schedule.begin(), action.schedule.end(), [](std::uint8_t a) { return a > 1; })) return false;
  const bool silent = action.is_silent();
  int qualified = 0;
  for (int k = 0; k < config.num_csps(); ++k) {
    int scheduled = 0;
    double importance = 0.0;
    for (int s : config.sensor_sets[static_cast<std::size_t>(k)]) {
      if (action.schedule[static_cast<std::size_t>(s)] != 0) {
        ++scheduled;
        importance += config.importance[static_cast<std::size_t>(s)];
      }
    }
    if (scheduled > config.channels) return false;
    if (importance >= config.threshold[static_cast<std::size_t>(k)] - kImportanceSlack) ++qualified;
  }
  return silent ? qualified == 0 : qualified == config.num_csps();
}

std::uint64_t canonical_index(const ProtoAction& proto, const ActionSpaces& spaces) {
  if (proto.indices.size() != spaces.subspaces.size()) {
    throw std::invalid_argument("canonical_index: proto-action has wrong dimension");
  }
  std::uint64_t index = 0;
  std::uint64_t stride = 1;
  for (std::size_t k = 0; k < proto.indices.size(); ++k) {
    if (proto.indices[k] == 0) return 0;
    index += (proto.indices[k] - 1) * stride;
    stride *= spaces.subspaces[k].size() - 1;
  }
  return index + 1;
}

ProtoAction proto_from_canonical(std::uint64_t index, const ActionSpaces& spaces) {
  if (index >= spaces.total_valid) throw std::out_of_range("proto_from_canonical: index out of range");
  ProtoAction proto;
  proto.indices.assign(spaces.subspaces.size(), 0);
  if (index == 0) return proto;
  std::uint64_t rest = index - 1;
  for (std::size_t k = 0; k < spaces.subspaces.size(); ++k) {
    const std::uint64_t radix = spaces.subspaces[k].size() - 1;
    proto.indices[k] = static_cast<std::size_t>(rest % radix) + 1;
    rest /= radix;
  }
  return proto;
}

}  // namespace aoci
