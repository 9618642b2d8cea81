#pragma once

#include "aoci/agent/agent.hpp"

namespace aoci::agent {

/// Independently uniform nonzero subset per CSP; never silent.
ValidAction random_act(const ActionSpaces& spaces, Rng& rng);

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(ActionSpaces spaces) : spaces_(std::move(spaces)) {}

  std::string algorithm() const override { return "random"; }
  void begin_episode() override {}
  Decision act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  bool learns() const override { return false; }
  std::optional<TrainMetrics> train_step(const EpisodeReplay&, int, Rng&) override { return std::nullopt; }
  void save(nn::Checkpoint& checkpoint) const override { checkpoint.header["algorithm"] = "random"; }
  void load(const nn::Checkpoint&) override {}

 private:
  ActionSpaces spaces_;
};

}  // namespace aoci::agent
