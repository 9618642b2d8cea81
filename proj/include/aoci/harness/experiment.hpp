#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoci/agent/agent.hpp"
#include "aoci/config.hpp"

namespace aoci::harness {

struct ExperimentConfig {
  NetworkConfig network;
  agent::TrainConfig train;
  std::string algorithm = "rss";  // rss | rss-woa | drqn | random
  std::vector<std::uint64_t> seeds{1};
  int eval_every = 1;  // training episodes between evaluation episodes
  bool deterministic_eval = false;
  std::string metrics_path;     // empty: no metrics file
  std::string checkpoint_path;  // "{seed}" is replaced by the run seed; empty: none

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

inline const std::vector<std::string> kAlgorithms = {"rss", "rss-woa", "drqn", "random"};

/// Builds a config from JSON. Schema (all keys optional unless noted):
///
///   network: { csps | sensor_sets, channels, failure_prob, eh_prob,
///              battery_cap, importance, threshold (required),
///              g_max, x_max, aoci_max, discount }
///   train:   { alpha, tau, lr_actor, lr_critic, replay_capacity,
///              start_episode, batch_episodes, seq_len, episodes, slots,
///              train_every, dense, hidden, epsilon_start, epsilon_end,
///              epsilon_eval, epsilon_anneal_episodes, drqn_action_cap }
///   algorithm, seeds, eval_every, deterministic_eval,
///   output: { metrics, checkpoint }
///
/// Per-sensor fields take a scalar or a list; unset per-sensor fields
/// follow the {0.05, 0.10, 0.15, 0.20} failure and {0.4, 0.6, 0.8, 1.0}
/// importance pattern by position within the set. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& json);
/// The `network` object alone, validated.
NetworkConfig parse_network_config(const nlohmann::json& json);
ExperimentConfig load_config(const std::string& path);

std::string checkpoint_for_seed(const std::string& pattern, std::uint64_t seed);

}  // namespace aoci::harness
