#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aoci/actspace.hpp"
#include "aoci/config.hpp"

namespace aoci::harness {

class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A memoryless policy: the same distribution over actions in every state.
struct FixedPolicy {
  std::vector<std::pair<ValidAction, double>> choices;
};

/// Schedules `action` with probability `p`, stays silent otherwise.
FixedPolicy schedule_with_probability(const ValidAction& action, double p);

struct OracleReport {
  std::size_t states = 0;
  int horizon = 0;             // series truncation length
  double max_discrepancy = 0;  // linear solve vs truncated series, over V and Q
  double recursion_residual = 0;  // |V - E_pi[Q - alpha log pi]|
  double iterative_discrepancy = 0;  // linear solve vs repeated soft Bellman backups
  double tolerance = 0;
  bool passed = false;

  // Per reachable state (index 0 is the reset state).
  Eigen::VectorXd value;          // soft state value from the linear solve
  Eigen::MatrixXd action_value;   // [states x actions]
  Eigen::MatrixXd reward;         // expected immediate reward [states x actions]
  double entropy = 0;             // of the fixed policy
};

/// Enumerates the joint chain over (G, X, battery, battery-reading flag,
/// AoCI) reachable from reset under `policy`, solves the soft recursions
///   Q = r + gamma P_a V,   V = sum_a pi(a) (Q(., a) - alpha log pi(a))
/// as a sparse linear system, and compares with the truncated discounted
/// series of rewards plus alpha-weighted entropy.
OracleReport oracle_soft_values(const NetworkConfig& config, const FixedPolicy& policy, double gamma, double alpha,
                                double tolerance, std::size_t max_states = 100000);

/// The single-sensor instance used for the consistency check.
NetworkConfig tiny_oracle_network();

}  // namespace aoci::harness
