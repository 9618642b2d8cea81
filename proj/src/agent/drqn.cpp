#include "aoci/agent/drqn.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace aoci::agent {

namespace {

std::uint64_t checked_width(const ActionSpaces& spaces, const TrainConfig& config) {
  if (spaces.total_valid > config.drqn_action_cap) {
    throw ActionSpaceTooLarge("drqn: " + std::to_string(spaces.total_valid) + " valid actions exceed the cap of " +
                              std::to_string(config.drqn_action_cap));
  }
  return spaces.total_valid;
}

}  // namespace

DrqnAgent::DrqnAgent(int obs_width, ActionSpaces spaces, TrainConfig config, std::uint64_t init_seed)
    : obs_width_(obs_width),
      spaces_(std::move(spaces)),
      config_(config),
      net_({obs_width, config.dense, config.hidden, static_cast<nn::Index>(checked_width(spaces_, config))}),
      target_(net_.shape()),
      opt_(net_.num_params(), config.lr_critic) {
  config_.validate();
  Rng rng(init_seed);
  net_.init_he(rng);
  target_.params() = net_.params();
  begin_episode();
}

void DrqnAgent::begin_episode() { state_ = nn::RecurrentState::zeros(config_.hidden, 1); }

double DrqnAgent::epsilon(std::uint64_t steps) const {
  const int anneal_episodes =
      config_.epsilon_anneal_episodes > 0 ? config_.epsilon_anneal_episodes : std::max(1, config_.episodes / 2);
  const double horizon = static_cast<double>(anneal_episodes) * config_.slots;
  const double frac = std::min(1.0, static_cast<double>(steps) / horizon);
  return config_.epsilon_start + frac * (config_.epsilon_end - config_.epsilon_start);
}

Decision DrqnAgent::act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  const nn::Vector q = net_.step(obs, state_);
  double eps = 0.0;
  if (mode == ActMode::explore) {
    eps = epsilon(explore_steps_++);
  } else if (mode == ActMode::evaluate) {
    eps = config_.epsilon_eval;
  }
  std::uint64_t index = 0;
  if (eps > 0.0 && uniform01(rng) < eps) {
    index = uniform_index(rng, spaces_.total_valid);
  } else {
    Eigen::Index best = 0;
    q.maxCoeff(&best);
    index = static_cast<std::uint64_t>(best);
  }
  Decision d;
  d.action = map_to_valid(proto_from_canonical(index, spaces_), spaces_);
  d.record = Eigen::VectorXd::Constant(1, static_cast<double>(index));
  return d;
}

double DrqnAgent::td_loss(const SequenceBatch& batch, nn::Vector* grad) const {
  const Eigen::Index b = batch.batch;
  const Eigen::Index lb = batch.length * b;
  if (batch.obs.rows() != obs_width_ || batch.actions.rows() != 1 || batch.actions.cols() != lb) {
    throw std::invalid_argument("DrqnAgent: batch shape does not match the agent");
  }
  const Eigen::MatrixXd qt = target_.forward_seq(batch.obs, b);
  nn::SequenceCache cache;
  const Eigen::MatrixXd q = net_.forward_seq(batch.obs.leftCols(lb), b, nullptr, grad ? &cache : nullptr);

  const double n = static_cast<double>(lb);
  double loss = 0.0;
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), lb);
  for (Eigen::Index c = 0; c < lb; ++c) {
    const auto a = static_cast<Eigen::Index>(batch.actions(0, c));
    const double y = batch.rewards(0, c) + config_.gamma * qt.col(b + c).maxCoeff();
    const double r = q(a, c) - y;
    loss += r * r;
    dq(a, c) = 2.0 * r / n;
  }
  if (grad != nullptr) net_.backward_seq(cache, dq, grad, nullptr);
  return loss / n;
}

std::optional<TrainMetrics> DrqnAgent::train_step(const EpisodeReplay& replay, int episode, Rng& rng) {
  if (episode <= config_.start_episode) return std::nullopt;
  if (replay.size() < static_cast<std::size_t>(config_.batch_episodes)) {
    throw ReplayError("train_step: replay holds fewer episodes than the batch size");
  }
  const auto batch = replay.gather(replay.sample_sequences(config_.batch_episodes, config_.seq_len, rng), config_.seq_len);
  nn::Vector g;
  TrainMetrics m;
  m.critic1_loss = td_loss(batch, &g);
  m.critic2_loss = std::numeric_limits<double>::quiet_NaN();
  m.actor_loss = std::numeric_limits<double>::quiet_NaN();
  opt_.step(net_.params(), g);
  nn::ema_blend(target_.params(), net_.params(), config_.tau);
  return m;
}

void DrqnAgent::save(nn::Checkpoint& checkpoint) const {
  checkpoint.header["algorithm"] = "drqn";
  checkpoint.add("q", net_);
  checkpoint.add("q_target", target_);
}

void DrqnAgent::load(const nn::Checkpoint& checkpoint) {
  auto it = checkpoint.header.find("algorithm");
  if (it != checkpoint.header.end() && it->second != "drqn") {
    throw nn::CheckpointError("checkpoint was written by '" + it->second + "', not 'drqn'");
  }
  checkpoint.restore("q", net_);
  checkpoint.restore("q_target", target_);
}

}  // namespace aoci::agent
