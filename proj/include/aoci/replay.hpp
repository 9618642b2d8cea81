#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "aoci/rng.hpp"

namespace aoci {

/// One slot of experience: normalized observation, the action record the
/// learner wants replayed (primitive action for actor-critic learners, the
/// canonical index for DRQN), reward, and the next normalized observation.
struct ExperienceTuple {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
};

/// A completed episode stored compactly: observations[t + 1] is the next
/// observation of tuple t.
struct ExperienceEpisode {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::VectorXd> actions;
  std::vector<double> rewards;

  std::size_t length() const { return rewards.size(); }
  ExperienceTuple tuple(std::size_t t) const;
};

/// Location of a sampled run of tuples.
struct SequenceRef {
  std::size_t episode = 0;
  std::size_t start = 0;
};

/// Sequences laid out time-major for the networks: column block t holds the
/// `batch` sequences at step t. `obs` carries length + 1 steps (the final
/// step is the next observation of the last tuple).
struct SequenceBatch {
  Eigen::Index batch = 0;
  Eigen::Index length = 0;
  Eigen::MatrixXd obs;      // [obs_dim x (length + 1) * batch]
  Eigen::MatrixXd actions;  // [action_dim x length * batch]
  Eigen::MatrixXd rewards;  // [1 x length * batch]
};

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Temporary per-episode buffer plus a FIFO store of finished episodes.
class EpisodeReplay {
 public:
  explicit EpisodeReplay(std::size_t capacity);

  /// Appends to the open episode; rejects tuples that do not chain onto the
  /// previous one.
  void push_step(const ExperienceTuple& tuple);
  /// Moves the open episode into the store, evicting the oldest beyond capacity.
  void end_episode();

  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t pending_length() const { return pending_.length(); }
  const ExperienceEpisode& episode(std::size_t i) const { return store_.at(i); }

  /// Draws `batch` distinct episodes uniformly and a uniform start in each.
  std::vector<SequenceRef> sample_sequences(std::size_t batch, std::size_t length, Rng& rng) const;
  SequenceBatch gather(const std::vector<SequenceRef>& refs, std::size_t length) const;

 private:
  std::size_t capacity_;
  ExperienceEpisode pending_;
  std::deque<ExperienceEpisode> store_;
};

}  // namespace aoci
