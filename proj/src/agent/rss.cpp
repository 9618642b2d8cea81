#include "aoci/agent/rss.hpp"

#include <stdexcept>

namespace aoci::agent {

namespace {

nn::NetShape actor_shape(int obs_width, int dims, const TrainConfig& c) {
  return {obs_width, c.dense, c.hidden, 2 * dims};
}

nn::NetShape critic_shape(int obs_width, int dims, const TrainConfig& c) {
  return {obs_width + dims, c.dense, c.hidden, 1};
}

nn::RecurrentNet make_net(nn::NetShape shape, Rng& rng) {
  nn::RecurrentNet net(shape);
  net.init_he(rng);
  return net;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
  }
  return m;
}

void check_batch(const SequenceBatch& batch, int obs_width, int dims) {
  const Eigen::Index lb = batch.length * batch.batch;
  if (batch.batch <= 0 || batch.length <= 0 || batch.obs.rows() != obs_width ||
      batch.obs.cols() != (batch.length + 1) * batch.batch || batch.actions.rows() != dims ||
      batch.actions.cols() != lb || batch.rewards.cols() != lb) {
    throw std::invalid_argument("RssAgent: batch shape does not match the agent");
  }
}

}  // namespace

RssAgent::RssAgent(int obs_width, std::shared_ptr<const ActionCodec> codec, TrainConfig config,
                   std::uint64_t init_seed, std::string algorithm)
    : obs_width_(obs_width),
      codec_(std::move(codec)),
      config_(config),
      algorithm_(std::move(algorithm)),
      actor_(actor_shape(obs_width, codec_->dims(), config)),
      critics_{nn::RecurrentNet(critic_shape(obs_width, codec_->dims(), config)),
               nn::RecurrentNet(critic_shape(obs_width, codec_->dims(), config))},
      targets_{critics_},
      actor_opt_(actor_.num_params(), config.lr_actor),
      critic_opts_{nn::RmsProp(critics_[0].num_params(), config.lr_critic),
                   nn::RmsProp(critics_[1].num_params(), config.lr_critic)} {
  config_.validate();
  Rng rng(init_seed);
  actor_ = make_net(actor_.shape(), rng);
  critics_[0] = make_net(critics_[0].shape(), rng);
  critics_[1] = make_net(critics_[1].shape(), rng);
  targets_ = critics_;
  begin_episode();
}

void RssAgent::begin_episode() { state_ = nn::RecurrentState::zeros(config_.hidden, 1); }

ActOutput RssAgent::act_detailed(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  const int k = codec_->dims();
  const nn::Vector head = actor_.step(obs, state_);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(k);
  if (mode != ActMode::deterministic) {
    for (int i = 0; i < k; ++i) noise[i] = standard_normal(rng);
  }
  const auto sample = sample_primitive(head.head(k), head.tail(k), noise, codec_->sizes());
  return {codec_->decode(sample.primitive), sample.primitive, sample.log_prob};
}

Decision RssAgent::act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  auto out = act_detailed(obs, mode, rng);
  return {std::move(out.action), Eigen::Map<const Eigen::VectorXd>(out.primitive.values.data(),
                                                                   static_cast<Eigen::Index>(out.primitive.values.size())),
          out.log_prob};
}

Eigen::MatrixXd RssAgent::critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& squashed) const {
  Eigen::MatrixXd in(obs.rows() + squashed.rows(), obs.cols());
  in.topRows(obs.rows()) = obs;
  in.bottomRows(squashed.rows()) = squashed;
  return in;
}

ActorPass RssAgent::actor_pass(const SequenceBatch& batch) const {
  check_batch(batch, obs_width_, codec_->dims());
  ActorPass pass;
  pass.head = actor_.forward_seq(batch.obs, batch.batch, nullptr, &pass.cache);
  return pass;
}

CriticLosses RssAgent::critic_loss(const SequenceBatch& batch, const Eigen::MatrixXd& next_noise, nn::Vector* grad1,
                                   nn::Vector* grad2, const ActorPass* pass) const {
  const int k = codec_->dims();
  check_batch(batch, obs_width_, k);
  const Eigen::Index b = batch.batch;
  const Eigen::Index lb = batch.length * b;
  if (next_noise.rows() != k || next_noise.cols() != batch.obs.cols()) {
    throw std::invalid_argument("critic_loss: noise must be [K x (L + 1) * B]");
  }
  const auto& sizes = codec_->sizes();

  // Targets from the actor's fresh samples at positions 1..L.
  const auto next = squash_batch(pass ? pass->head : actor_.forward_seq(batch.obs, b), next_noise, sizes);
  const Eigen::MatrixXd target_in = critic_input(batch.obs, next.squashed);
  const Eigen::MatrixXd q1t = targets_[0].forward_seq(target_in, b);
  const Eigen::MatrixXd q2t = targets_[1].forward_seq(target_in, b);
  const Eigen::RowVectorXd soft_next =
      q1t.rightCols(lb).cwiseMin(q2t.rightCols(lb)).row(0) - config_.alpha * next.log_prob.tail(lb);
  const Eigen::RowVectorXd y = batch.rewards.row(0) + config_.gamma * soft_next;

  Eigen::MatrixXd stored(k, lb);
  for (int i = 0; i < k; ++i) stored.row(i) = batch.actions.row(i) * (2.0 / sizes[i]) - Eigen::RowVectorXd::Ones(lb);
  const Eigen::MatrixXd in = critic_input(batch.obs.leftCols(lb), stored);

  CriticLosses losses;
  nn::Vector* grads[2] = {grad1, grad2};
  double* out[2] = {&losses.critic1, &losses.critic2};
  for (int j = 0; j < 2; ++j) {
    nn::SequenceCache cache;
    const Eigen::MatrixXd q = critics_[j].forward_seq(in, b, nullptr, grads[j] ? &cache : nullptr);
    const Eigen::RowVectorXd residual = q.row(0) - y;
    *out[j] = residual.squaredNorm() / static_cast<double>(lb);
    if (grads[j] != nullptr) {
      const Eigen::MatrixXd dq = residual * (2.0 / static_cast<double>(lb));
      critics_[j].backward_seq(cache, dq, grads[j], nullptr);
    }
  }
  return losses;
}

double RssAgent::actor_loss(const SequenceBatch& batch, const Eigen::MatrixXd& noise, nn::Vector* grad,
                           const ActorPass* pass) const {
  const int k = codec_->dims();
  check_batch(batch, obs_width_, k);
  const Eigen::Index b = batch.batch;
  const Eigen::Index lb = batch.length * b;
  if (noise.rows() != k || noise.cols() != lb) throw std::invalid_argument("actor_loss: noise must be [K x L * B]");

  // The actor runs over the whole window; its final step only feeds targets.
  ActorPass local;
  if (pass == nullptr) {
    local = actor_pass(batch);
    pass = &local;
  }
  const Eigen::MatrixXd obs = batch.obs.leftCols(lb);
  const auto s = squash_batch(pass->head.leftCols(lb), noise, codec_->sizes());
  const Eigen::MatrixXd in = critic_input(obs, s.squashed);

  nn::SequenceCache caches[2];
  Eigen::MatrixXd q[2];
  for (int j = 0; j < 2; ++j) q[j] = critics_[j].forward_seq(in, b, nullptr, grad ? &caches[j] : nullptr);
  const Eigen::RowVectorXd min_q = q[0].cwiseMin(q[1]).row(0);
  const double n = static_cast<double>(lb);
  const double loss = (config_.alpha * s.log_prob - min_q).sum() / n;
  if (grad == nullptr) return loss;

  // -1/n flows into whichever critic attains the minimum (critic 1 on ties).
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(k, lb);
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(1, lb);
    bool any = false;
    for (Eigen::Index c = 0; c < lb; ++c) {
      const bool chosen = j == 0 ? q[0](0, c) <= q[1](0, c) : q[1](0, c) < q[0](0, c);
      if (chosen) {
        dq(0, c) = -1.0 / n;
        any = true;
      }
    }
    if (!any) continue;
    Eigen::MatrixXd dinput;
    critics_[j].backward_seq(caches[j], dq, nullptr, &dinput);
    da += dinput.bottomRows(k);
  }
  const Eigen::RowVectorXd dlogp = Eigen::RowVectorXd::Constant(lb, config_.alpha / n);
  Eigen::MatrixXd dhead = Eigen::MatrixXd::Zero(pass->head.rows(), pass->head.cols());
  dhead.leftCols(lb) = squash_backward(s, dlogp, da);
  actor_.backward_seq(pass->cache, dhead, grad, nullptr);
  return loss;
}

CriticLosses RssAgent::critic_update(const SequenceBatch& batch, const Eigen::MatrixXd& next_noise,
                                     const ActorPass* pass) {
  nn::Vector g1, g2;
  const auto losses = critic_loss(batch, next_noise, &g1, &g2, pass);
  critic_opts_[0].step(critics_[0].params(), g1);
  critic_opts_[1].step(critics_[1].params(), g2);
  return losses;
}

double RssAgent::actor_update(const SequenceBatch& batch, const Eigen::MatrixXd& noise, const ActorPass* pass) {
  nn::Vector g;
  const double loss = actor_loss(batch, noise, &g, pass);
  actor_opt_.step(actor_.params(), g);
  return loss;
}

void RssAgent::update_targets() {
  for (int j = 0; j < 2; ++j) nn::ema_blend(targets_[j].params(), critics_[j].params(), config_.tau);
}

std::optional<TrainMetrics> RssAgent::train_step(const EpisodeReplay& replay, int episode, Rng& rng) {
  if (episode <= config_.start_episode) return std::nullopt;
  if (replay.size() < static_cast<std::size_t>(config_.batch_episodes)) {
    throw ReplayError("train_step: replay holds fewer episodes than the batch size");
  }
  const auto refs = replay.sample_sequences(config_.batch_episodes, config_.seq_len, rng);
  const auto batch = replay.gather(refs, config_.seq_len);
  const int k = codec_->dims();
  const Eigen::MatrixXd next_noise = gaussian(k, batch.obs.cols(), rng);
  const Eigen::MatrixXd noise = gaussian(k, batch.actions.cols(), rng);
  // Critic steps leave the actor untouched, so one actor pass serves both losses.
  const ActorPass pass = actor_pass(batch);
  TrainMetrics m;
  const auto c = critic_update(batch, next_noise, &pass);
  m.critic1_loss = c.critic1;
  m.critic2_loss = c.critic2;
  m.actor_loss = actor_update(batch, noise, &pass);
  update_targets();
  return m;
}

void RssAgent::save(nn::Checkpoint& checkpoint) const {
  checkpoint.header["algorithm"] = algorithm_;
  checkpoint.header["codec"] = codec_->name();
  checkpoint.add("actor", actor_);
  checkpoint.add("critic1", critics_[0]);
  checkpoint.add("critic2", critics_[1]);
  checkpoint.add("target1", targets_[0]);
  checkpoint.add("target2", targets_[1]);
}

void RssAgent::load(const nn::Checkpoint& checkpoint) {
  auto it = checkpoint.header.find("algorithm");
  if (it != checkpoint.header.end() && it->second != algorithm_) {
    throw nn::CheckpointError("checkpoint was written by '" + it->second + "', not '" + algorithm_ + "'");
  }
  checkpoint.restore("actor", actor_);
  checkpoint.restore("critic1", critics_[0]);
  checkpoint.restore("critic2", critics_[1]);
  checkpoint.restore("target1", targets_[0]);
  checkpoint.restore("target2", targets_[1]);
}

}  // namespace aoci::agent
