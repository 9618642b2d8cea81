#include "aoci/harness/oracle.hpp"

#include <cmath>
#include <deque>
#include <map>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "aoci/env.hpp"

namespace aoci::harness {

namespace {

using Key = std::vector<int>;
using SparseMatrix = Eigen::SparseMatrix<double>;

Key key_of(const EnvState& s, const std::vector<bool>& reading) {
  Key k;
  for (std::size_t n = 0; n < s.battery.size(); ++n) {
    k.push_back(s.since_delivery[n]);
    k.push_back(s.scheduled_count[n]);
    k.push_back(s.battery[n]);
    k.push_back(reading[n] ? 1 : 0);
  }
  k.push_back(s.aoci);
  return k;
}

struct Chain {
  std::vector<EnvState> states;
  std::vector<std::vector<bool>> readings;
  std::vector<SparseMatrix> kernels;  // one per policy action
  Eigen::MatrixXd reward;             // [states x actions]
};

Chain build_chain(const NetworkConfig& config, const FixedPolicy& policy, std::size_t max_states) {
  const int n = config.num_sensors();
  if (n > 8) throw StateSpaceTooLarge("oracle: too many sensors to enumerate random draws");
  const std::size_t actions = policy.choices.size();

  Chain chain;
  std::map<Key, std::size_t> index;
  std::deque<std::size_t> frontier;
  auto intern = [&](const EnvState& s, const std::vector<bool>& reading) {
    auto [it, fresh] = index.emplace(key_of(s, reading), chain.states.size());
    if (fresh) {
      if (chain.states.size() >= max_states) throw StateSpaceTooLarge("oracle: reachable chain exceeds the state limit");
      chain.states.push_back(s);
      chain.readings.push_back(reading);
      frontier.push_back(it->second);
    }
    return it->second;
  };

  const auto [start, start_obs] = reset(config);
  std::vector<bool> start_reading(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) start_reading[static_cast<std::size_t>(i)] = start_obs.battery[static_cast<std::size_t>(i)].has_value();
  intern(start, start_reading);

  std::vector<std::vector<Eigen::Triplet<double>>> triplets(actions);
  std::vector<std::vector<double>> rewards;
  const std::uint32_t draws = 1U << n;
  while (!frontier.empty()) {
    const std::size_t from = frontier.front();
    frontier.pop_front();
    rewards.resize(chain.states.size(), std::vector<double>(actions, 0.0));
    for (std::size_t a = 0; a < actions; ++a) {
      std::map<std::size_t, double> row;
      double expected = 0.0;
      for (std::uint32_t sbits = 0; sbits < draws; ++sbits) {
        for (std::uint32_t ebits = 0; ebits < draws; ++ebits) {
          double p = 1.0;
          Indicators success(static_cast<std::size_t>(n)), arrivals(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            success[u] = (sbits >> i) & 1U;
            arrivals[u] = (ebits >> i) & 1U;
            p *= success[u] ? 1.0 - config.failure_prob[u] : config.failure_prob[u];
            p *= arrivals[u] ? config.eh_prob[u] : 1.0 - config.eh_prob[u];
          }
          if (p == 0.0) continue;
          const EnvState state = chain.states[from];  // copy: intern() may reallocate
          const auto [next, outcome] = transition(state, policy.choices[a].first, success, arrivals, config);
          std::vector<bool> reading(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) {
            reading[static_cast<std::size_t>(i)] = outcome.next_obs.battery[static_cast<std::size_t>(i)].has_value();
          }
          row[intern(next, reading)] += p;
          expected += p * outcome.reward;
        }
      }
      rewards.resize(chain.states.size(), std::vector<double>(actions, 0.0));
      rewards[from][a] = expected;
      for (const auto& [to, p] : row) triplets[a].emplace_back(static_cast<int>(from), static_cast<int>(to), p);
    }
  }

  const auto s = static_cast<Eigen::Index>(chain.states.size());
  chain.reward.resize(s, static_cast<Eigen::Index>(actions));
  for (Eigen::Index i = 0; i < s; ++i) {
    for (std::size_t a = 0; a < actions; ++a) chain.reward(i, static_cast<Eigen::Index>(a)) = rewards[static_cast<std::size_t>(i)][a];
  }
  for (std::size_t a = 0; a < actions; ++a) {
    SparseMatrix m(s, s);
    m.setFromTriplets(triplets[a].begin(), triplets[a].end());
    chain.kernels.push_back(std::move(m));
  }
  return chain;
}

}  // namespace

FixedPolicy schedule_with_probability(const ValidAction& action, double p) {
  FixedPolicy policy;
  policy.choices.emplace_back(silent_action(static_cast<int>(action.schedule.size())), 1.0 - p);
  policy.choices.emplace_back(action, p);
  return policy;
}

NetworkConfig tiny_oracle_network() {
  NetworkConfig c;
  c.sensor_sets = {{0}};
  c.channels = 1;
  c.failure_prob = {0.2};
  c.eh_prob = {0.5};
  c.battery_cap = {2};
  c.importance = {1.0};
  c.threshold = {1.0};
  c.g_max = 8;
  c.x_max = 8;
  c.aoci_max = 8;
  c.discount = 0.9;
  return c;
}

OracleReport oracle_soft_values(const NetworkConfig& config, const FixedPolicy& policy, double gamma, double alpha,
                                double tolerance, std::size_t max_states) {
  validate(config);
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("oracle: gamma must lie in [0, 1)");
  double total = 0.0;
  for (const auto& [action, p] : policy.choices) {
    if (!(p > 0.0)) throw std::invalid_argument("oracle: policy probabilities must be positive");
    if (!validate_action(action, config)) throw std::invalid_argument("oracle: policy contains an invalid action");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("oracle: policy probabilities must sum to 1");

  const Chain chain = build_chain(config, policy, max_states);
  const auto s = static_cast<Eigen::Index>(chain.states.size());
  const std::size_t actions = policy.choices.size();

  OracleReport report;
  report.states = chain.states.size();
  report.tolerance = tolerance;
  report.reward = chain.reward;
  for (const auto& [action, p] : policy.choices) report.entropy -= p * std::log(p);

  SparseMatrix p_pi(s, s);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(s, alpha * report.entropy);
  for (std::size_t a = 0; a < actions; ++a) {
    const double pa = policy.choices[a].second;
    p_pi += pa * chain.kernels[a];
    c += pa * chain.reward.col(static_cast<Eigen::Index>(a));
  }

  // Linear recursions.
  SparseMatrix system(s, s);
  system.setIdentity();
  system -= gamma * p_pi;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) throw std::runtime_error("oracle: sparse factorization failed");
  report.value = lu.solve(c);
  report.action_value.resize(s, static_cast<Eigen::Index>(actions));
  for (std::size_t a = 0; a < actions; ++a) {
    const auto col = static_cast<Eigen::Index>(a);
    report.action_value.col(col) = chain.reward.col(col) + gamma * (chain.kernels[a] * report.value);
  }
  Eigen::VectorXd soft = Eigen::VectorXd::Zero(s);
  for (std::size_t a = 0; a < actions; ++a) {
    const double pa = policy.choices[a].second;
    soft += pa * (report.action_value.col(static_cast<Eigen::Index>(a)).array() - alpha * std::log(pa)).matrix();
  }
  report.recursion_residual = (report.value - soft).cwiseAbs().maxCoeff();

  // Truncated series: per-slot magnitude is at most aoci_max + alpha * H.
  const double bound = config.aoci_max + alpha * report.entropy;
  int horizon = 1;
  if (gamma > 0.0) {
    horizon = static_cast<int>(std::ceil(std::log(1e-12 * (1.0 - gamma) / bound) / std::log(gamma))) + 1;
  }
  report.horizon = horizon;
  Eigen::VectorXd series = Eigen::VectorXd::Zero(s);
  Eigen::VectorXd term = c;
  double weight = 1.0;
  for (int l = 0; l < horizon; ++l) {
    series += weight * term;
    term = p_pi * term;
    weight *= gamma;
  }
  double worst = (series - report.value).cwiseAbs().maxCoeff();
  for (std::size_t a = 0; a < actions; ++a) {
    const auto col = static_cast<Eigen::Index>(a);
    const Eigen::VectorXd q_series = chain.reward.col(col) + gamma * (chain.kernels[a] * series);
    worst = std::max(worst, (q_series - report.action_value.col(col)).cwiseAbs().maxCoeff());
  }
  report.max_discrepancy = worst;

  // Repeated soft Bellman backups from zero.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(s);
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd next = c + gamma * (p_pi * v);
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change < 1e-14) break;
  }
  report.iterative_discrepancy = (v - report.value).cwiseAbs().maxCoeff();

  report.passed = report.max_discrepancy <= tolerance && report.recursion_residual <= tolerance &&
                  report.iterative_discrepancy <= tolerance;
  return report;
}

}  // namespace aoci::harness
