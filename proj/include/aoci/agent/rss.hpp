#pragma once

#include <array>
#include <memory>

#include "aoci/agent/action_codec.hpp"
#include "aoci/agent/agent.hpp"
#include "aoci/agent/policy_math.hpp"
#include "aoci/nn/optim.hpp"
#include "aoci/nn/recurrent_net.hpp"

namespace aoci::agent {

struct ActOutput {
  ValidAction action;
  PrimitiveAction primitive;
  double log_prob = 0.0;
};

/// Actor outputs over a whole batch window (L + 1 steps), shareable between
/// the critic and actor losses of one training step.
struct ActorPass {
  Eigen::MatrixXd head;
  nn::SequenceCache cache;
};

struct CriticLosses {
  double critic1 = 0.0;
  double critic2 = 0.0;
};

/// Recurrent soft actor-critic: actor, two critics, two target critics.
/// The actor maps an observation to K means and K log-scales; critics read
/// the observation together with the squashed action a in (-1, 1).
class RssAgent final : public Agent {
 public:
  RssAgent(int obs_width, std::shared_ptr<const ActionCodec> codec, TrainConfig config, std::uint64_t init_seed,
           std::string algorithm = "rss");

  std::string algorithm() const override { return algorithm_; }
  void begin_episode() override;
  Decision act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  std::optional<TrainMetrics> train_step(const EpisodeReplay& replay, int episode, Rng& rng) override;
  void save(nn::Checkpoint& checkpoint) const override;
  void load(const nn::Checkpoint& checkpoint) override;

  /// One actor step from the persistent recurrent state; zero noise in
  /// deterministic mode.
  ActOutput act_detailed(const Eigen::VectorXd& obs, ActMode mode, Rng& rng);

  /// Squared Bellman residuals of both critics against the shared target.
  /// `next_noise` is [K x (L + 1) * B]; gradients are written when non-null.
  CriticLosses critic_loss(const SequenceBatch& batch, const Eigen::MatrixXd& next_noise, nn::Vector* grad1,
                           nn::Vector* grad2, const ActorPass* pass = nullptr) const;
  /// mean(alpha * log pi - min_j Q_j) over freshly sampled actions; `noise`
  /// is [K x L * B].
  double actor_loss(const SequenceBatch& batch, const Eigen::MatrixXd& noise, nn::Vector* grad,
                    const ActorPass* pass = nullptr) const;

  ActorPass actor_pass(const SequenceBatch& batch) const;
  CriticLosses critic_update(const SequenceBatch& batch, const Eigen::MatrixXd& next_noise,
                             const ActorPass* pass = nullptr);
  double actor_update(const SequenceBatch& batch, const Eigen::MatrixXd& noise, const ActorPass* pass = nullptr);
  void update_targets();

  const TrainConfig& config() const { return config_; }
  const ActionCodec& codec() const { return *codec_; }
  nn::RecurrentNet& actor() { return actor_; }
  nn::RecurrentNet& critic(int j) { return critics_[j]; }
  nn::RecurrentNet& target(int j) { return targets_[j]; }
  const nn::RecurrentNet& actor() const { return actor_; }
  const nn::RecurrentNet& critic(int j) const { return critics_[j]; }
  const nn::RecurrentNet& target(int j) const { return targets_[j]; }

 private:
  /// Critic input rows: observation, then encoded action.
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& squashed) const;

  int obs_width_;
  std::shared_ptr<const ActionCodec> codec_;
  TrainConfig config_;
  std::string algorithm_;
  nn::RecurrentNet actor_;
  std::array<nn::RecurrentNet, 2> critics_;
  std::array<nn::RecurrentNet, 2> targets_;
  nn::RmsProp actor_opt_;
  std::array<nn::RmsProp, 2> critic_opts_;
  nn::RecurrentState state_;
};

}  // namespace aoci::agent
