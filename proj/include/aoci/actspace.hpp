#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoci/config.hpp"

namespace aoci {

using Indicators = std::vector<std::uint8_t>;

/// Scheduling decision over all N sensors.
struct ValidAction {
  Indicators schedule;

  bool is_silent() const;
  bool operator==(const ValidAction&) const = default;
  auto operator<=>(const ValidAction&) const = default;
};

/// Qualified subsets of one CSP's sensors. elements[0] is the all-zero vector;
/// the rest are ordered by cardinality, then lexicographically by sensor index.
struct Subspace {
  int csp = 0;
  std::vector<int> sensors;         // global sensor indices, ascending
  std::vector<Indicators> elements; // indicators over `sensors`

  std::size_t size() const { return elements.size(); }
};

struct ActionSpaces {
  std::vector<Subspace> subspaces;
  int num_sensors = 0;
  std::uint64_t total_valid = 0;  // prod(size_k - 1) + 1

  std::vector<std::size_t> sizes() const;
};

/// Continuous policy output, component k in (0, size_k).
struct PrimitiveAction {
  std::vector<double> values;
};

/// Per-CSP subspace indices, component k in [0, size_k).
struct ProtoAction {
  std::vector<std::size_t> indices;
  bool operator==(const ProtoAction&) const = default;
};

class NoQualifiedSubset : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ActionSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Subspace enumerate_subspace(int csp, std::span<const int> sensors, std::span<const double> importances,
                            int channels, double threshold);

ActionSpaces build_action_spaces(const NetworkConfig& config);

ProtoAction discretize(const PrimitiveAction& primitive, const ActionSpaces& spaces);

/// Any zero component collapses to the silent action; otherwise the chosen
/// subsets are concatenated.
ValidAction map_to_valid(const ProtoAction& proto, const ActionSpaces& spaces);

/// Channel limit per set, and either silence or every CSP's scheduled
/// importance meeting its threshold.
bool validate_action(const ValidAction& action, const NetworkConfig& config);

ValidAction silent_action(int num_sensors);

/// Canonical index over the valid-action space: 0 is the silent action, and
/// 1 + sum_k (p_k - 1) * stride_k indexes the all-nonzero proto-actions with
/// CSP 0 as the least significant digit.
std::uint64_t canonical_index(const ProtoAction& proto, const ActionSpaces& spaces);

/// Inverse of canonical_index; index 0 yields the all-zero proto-action.
ProtoAction proto_from_canonical(std::uint64_t index, const ActionSpaces& spaces);

}  // namespace aoci
