#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "aoci/actspace.hpp"
#include "aoci/nn/checkpoint.hpp"
#include "aoci/replay.hpp"
#include "aoci/rng.hpp"

namespace aoci::agent {

struct TrainConfig {
  double gamma = 0.99;
  double alpha = 0.02;
  double tau = 1e-3;
  double lr_actor = 5e-4;
  double lr_critic = 5e-4;
  std::size_t replay_capacity = 1000;  // episodes
  int start_episode = 200;             // training starts after this many episodes
  int batch_episodes = 10;
  int seq_len = 50;
  int episodes = 500;
  int slots = 1000;
  int train_every = 1;  // slots between training steps once past start_episode
  int dense = 128;
  int hidden = 128;

  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  double epsilon_eval = 0.05;
  int epsilon_anneal_episodes = 0;  // 0 means half of `episodes`
  std::uint64_t drqn_action_cap = 20000;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

enum class ActMode {
  explore,       // training behaviour
  evaluate,      // evaluation behaviour (stochastic policy, or small epsilon)
  deterministic  // policy mean or greedy
};

struct Decision {
  ValidAction action;
  /// What the replay buffer stores for this slot.
  Eigen::VectorXd record;
  double log_prob = 0.0;
};

struct TrainMetrics {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string algorithm() const = 0;
  /// Zeroes any recurrent state.
  virtual void begin_episode() = 0;
  virtual Decision act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) = 0;
  virtual bool learns() const { return true; }
  /// No-op (nullopt) until `episode` (1-based) exceeds start_episode.
  virtual std::optional<TrainMetrics> train_step(const EpisodeReplay& replay, int episode, Rng& rng) = 0;
  virtual void save(nn::Checkpoint& checkpoint) const = 0;
  virtual void load(const nn::Checkpoint& checkpoint) = 0;
};

}  // namespace aoci::agent
