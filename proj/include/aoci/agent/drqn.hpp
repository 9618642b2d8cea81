#pragma once

#include "aoci/agent/agent.hpp"
#include "aoci/nn/optim.hpp"
#include "aoci/nn/recurrent_net.hpp"

namespace aoci::agent {

/// Recurrent Q-network with one output per canonical valid-action index.
class DrqnAgent final : public Agent {
 public:
  /// Throws ActionSpaceTooLarge when |A| exceeds config.drqn_action_cap.
  DrqnAgent(int obs_width, ActionSpaces spaces, TrainConfig config, std::uint64_t init_seed);

  std::string algorithm() const override { return "drqn"; }
  void begin_episode() override;
  /// Explore mode follows the annealed epsilon and advances its clock;
  /// evaluate uses epsilon_eval; deterministic is greedy.
  Decision act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  std::optional<TrainMetrics> train_step(const EpisodeReplay& replay, int episode, Rng& rng) override;
  void save(nn::Checkpoint& checkpoint) const override;
  void load(const nn::Checkpoint& checkpoint) override;

  /// Epsilon after `explore_steps` exploratory slots.
  double epsilon(std::uint64_t explore_steps) const;
  std::uint64_t explore_steps() const { return explore_steps_; }

  /// Mean squared TD error against U + gamma * max_a Q_target(next, a).
  double td_loss(const SequenceBatch& batch, nn::Vector* grad) const;

  nn::RecurrentNet& q_net() { return net_; }
  nn::RecurrentNet& target() { return target_; }
  const ActionSpaces& spaces() const { return spaces_; }

 private:
  int obs_width_;
  ActionSpaces spaces_;
  TrainConfig config_;
  nn::RecurrentNet net_;
  nn::RecurrentNet target_;
  nn::RmsProp opt_;
  nn::RecurrentState state_;
  std::uint64_t explore_steps_ = 0;
};

}  // namespace aoci::agent
