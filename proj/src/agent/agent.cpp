#include "aoci/agent/agent.hpp"

#include "aoci/config.hpp"

namespace aoci::agent {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) throw ConfigError(std::string("train.") + field + ": " + rule);
  };
  require(gamma >= 0.0 && gamma < 1.0, "discount", "must lie in [0, 1)");
  require(alpha >= 0.0, "alpha", "must be non-negative");
  require(tau >= 0.0 && tau <= 1.0, "tau", "must lie in [0, 1]");
  require(lr_actor > 0.0, "lr_actor", "must be positive");
  require(lr_critic > 0.0, "lr_critic", "must be positive");
  require(replay_capacity >= 1, "replay_capacity", "must be at least 1");
  require(start_episode >= 0, "start_episode", "must be non-negative");
  require(batch_episodes >= 1, "batch_episodes", "must be at least 1");
  require(replay_capacity >= static_cast<std::size_t>(batch_episodes), "replay_capacity",
          "must hold at least batch_episodes episodes");
  require(seq_len >= 1, "seq_len", "must be at least 1");
  require(slots >= 1, "slots", "must be at least 1");
  require(seq_len <= slots, "seq_len", "must not exceed slots");
  require(episodes >= 0, "episodes", "must be non-negative");
  require(train_every >= 1, "train_every", "must be at least 1");
  require(dense >= 1 && hidden >= 1, "dense/hidden", "widths must be positive");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start", "must lie in [0, 1]");
  require(epsilon_end >= 0.0 && epsilon_end <= 1.0, "epsilon_end", "must lie in [0, 1]");
  require(epsilon_eval >= 0.0 && epsilon_eval <= 1.0, "epsilon_eval", "must lie in [0, 1]");
  require(epsilon_anneal_episodes >= 0, "epsilon_anneal_episodes", "must be non-negative");
}

}  // namespace aoci::agent
