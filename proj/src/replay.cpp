#include "aoci/replay.hpp"

#include <numeric>

namespace aoci {

ExperienceTuple ExperienceEpisode::tuple(std::size_t t) const {
  return {observations.at(t), actions.at(t), rewards.at(t), observations.at(t + 1)};
}

EpisodeReplay::EpisodeReplay(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ReplayError("replay capacity must be positive");
}

void EpisodeReplay::push_step(const ExperienceTuple& tuple) {
  if (pending_.observations.empty()) {
    pending_.observations.push_back(tuple.obs);
  } else if (pending_.observations.back().size() != tuple.obs.size() || pending_.observations.back() != tuple.obs) {
    throw ReplayError("push_step: observation does not match the previous next_obs");
  }
  pending_.observations.push_back(tuple.next_obs);
  pending_.actions.push_back(tuple.action);
  pending_.rewards.push_back(tuple.reward);
}

void EpisodeReplay::end_episode() {
  if (pending_.length() == 0) throw ReplayError("end_episode: temporary buffer is empty");
  store_.push_back(std::move(pending_));
  pending_ = ExperienceEpisode{};
  while (store_.size() > capacity_) store_.pop_front();
}

std::vector<SequenceRef> EpisodeReplay::sample_sequences(std::size_t batch, std::size_t length, Rng& rng) const {
  if (batch == 0 || length == 0) throw ReplayError("sample_sequences: batch and length must be positive");
  if (store_.size() < batch) throw ReplayError("sample_sequences: not enough episodes stored");
  for (const auto& ep : store_) {
    if (ep.length() < length) throw ReplayError("sample_sequences: stored episode shorter than sequence length");
  }

  // Partial Fisher-Yates: the first `batch` slots become a uniform draw without replacement.
  std::vector<std::size_t> order(store_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<SequenceRef> refs;
  refs.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t j = i + uniform_index(rng, order.size() - i);
    std::swap(order[i], order[j]);
    const auto& ep = store_[order[i]];
    refs.push_back({order[i], uniform_index(rng, ep.length() - length + 1)});
  }
  return refs;
}

SequenceBatch EpisodeReplay::gather(const std::vector<SequenceRef>& refs, std::size_t length) const {
  if (refs.empty()) throw ReplayError("gather: no sequences");
  const auto& first = store_.at(refs.front().episode);
  const Eigen::Index obs_dim = first.observations.front().size();
  const Eigen::Index act_dim = first.actions.front().size();
  const auto batch = static_cast<Eigen::Index>(refs.size());
  const auto len = static_cast<Eigen::Index>(length);

  SequenceBatch out;
  out.batch = batch;
  out.length = len;
  out.obs.resize(obs_dim, (len + 1) * batch);
  out.actions.resize(act_dim, len * batch);
  out.rewards.resize(1, len * batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& ref = refs[static_cast<std::size_t>(b)];
    const auto& ep = store_.at(ref.episode);
    if (ref.start + length > ep.length()) throw ReplayError("gather: sequence runs past the episode end");
    for (Eigen::Index t = 0; t <= len; ++t) {
      out.obs.col(t * batch + b) = ep.observations[ref.start + static_cast<std::size_t>(t)];
    }
    for (Eigen::Index t = 0; t < len; ++t) {
      const auto idx = ref.start + static_cast<std::size_t>(t);
      out.actions.col(t * batch + b) = ep.actions[idx];
      out.rewards(0, t * batch + b) = ep.rewards[idx];
    }
  }
  return out;
}

}  // namespace aoci
