#include "aoci/harness/runner.hpp"

#include <malloc.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "aoci/agent/action_codec.hpp"
#include "aoci/agent/baselines.hpp"
#include "aoci/agent/drqn.hpp"
#include "aoci/agent/policy_math.hpp"
#include "aoci/agent/rss.hpp"
#include "aoci/env.hpp"

namespace aoci::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nn::Checkpoint checkpoint_of(const agent::Agent& agent, const ExperimentConfig& config, std::uint64_t seed) {
  nn::Checkpoint cp;
  cp.header["format"] = "1";
  cp.header["seed"] = std::to_string(seed);
  cp.header["sensors"] = std::to_string(config.network.num_sensors());
  cp.header["csps"] = std::to_string(config.network.num_csps());
  cp.header["obs_width"] = std::to_string(agent::observation_width(config.network));
  agent.save(cp);
  return cp;
}

}  // namespace

RunStreams RunStreams::from_seed(std::uint64_t seed) {
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3), derive_seed(seed, 4)};
}

std::uint64_t eval_env_seed(std::uint64_t run_seed, int episode) {
  return derive_seed(derive_seed(run_seed, 5), static_cast<std::uint64_t>(episode));
}

std::uint64_t eval_act_seed(std::uint64_t run_seed, int episode) {
  return derive_seed(derive_seed(run_seed, 6), static_cast<std::uint64_t>(episode));
}

std::unique_ptr<agent::Agent> make_agent(const ExperimentConfig& config, std::uint64_t init_seed) {
  const int width = agent::observation_width(config.network);
  auto spaces = build_action_spaces(config.network);
  if (config.algorithm == "rss") {
    return std::make_unique<agent::RssAgent>(width, std::make_shared<agent::DecomposedCodec>(std::move(spaces)),
                                             config.train, init_seed, "rss");
  }
  if (config.algorithm == "rss-woa") {
    return std::make_unique<agent::RssAgent>(width, std::make_shared<agent::FlatCodec>(std::move(spaces)),
                                             config.train, init_seed, "rss-woa");
  }
  if (config.algorithm == "drqn") {
    return std::make_unique<agent::DrqnAgent>(width, std::move(spaces), config.train, init_seed);
  }
  if (config.algorithm == "random") return std::make_unique<agent::RandomAgent>(std::move(spaces));
  throw ConfigError("config field 'algorithm': unknown algorithm '" + config.algorithm + "'");
}

EpisodeResult evaluate_episode(agent::Agent& agent, const NetworkConfig& network, int slots, std::uint64_t env_seed,
                               std::uint64_t act_seed, bool deterministic) {
  Environment env(network, env_seed);
  Rng rng(act_seed);
  Observation obs = env.reset();
  agent.begin_episode();
  const auto mode = deterministic ? agent::ActMode::deterministic : agent::ActMode::evaluate;
  double reward = 0.0;
  std::vector<double> mre(static_cast<std::size_t>(network.num_csps()), 0.0);
  for (int t = 0; t < slots; ++t) {
    const auto slot_min = min_battery_per_set(env.state().battery, network);
    for (std::size_t k = 0; k < mre.size(); ++k) mre[k] += slot_min[k];
    const auto decision = agent.act(agent::normalize_obs(obs, network), mode, rng);
    auto outcome = env.step(decision.action);
    reward += outcome.reward;
    obs = std::move(outcome.next_obs);
  }
  EpisodeResult r;
  r.avg_reward = reward / slots;
  for (auto& m : mre) m /= slots;
  r.mre = std::move(mre);
  return r;
}

std::string metrics_header(int num_sets) {
  std::string h = "seed,episode,eval_avg_reward,critic1_loss,critic2_loss,actor_loss";
  for (int k = 1; k <= num_sets; ++k) h += ",mre_" + std::to_string(k);
  return h;
}

std::string format_row(const MetricsRow& row) {
  std::string s = std::to_string(row.seed) + "," + std::to_string(row.episode) + "," + num(row.eval_avg_reward) + "," +
                  num(row.critic1_loss) + "," + num(row.critic2_loss) + "," + num(row.actor_loss);
  for (double m : row.mre) s += "," + num(m);
  return s;
}

std::vector<MetricsRow> train_seed(const ExperimentConfig& config, std::uint64_t seed, agent::Agent& agent,
                                   std::ostream* log) {
  const auto& net = config.network;
  const auto& tc = config.train;
  const auto streams = RunStreams::from_seed(seed);
  Environment env(net, streams.env);
  Rng act_rng(streams.act);
  Rng train_rng(streams.train);
  EpisodeReplay replay(tc.replay_capacity);
  const auto started = std::chrono::steady_clock::now();

  std::vector<MetricsRow> rows;
  for (int episode = 1; episode <= tc.episodes; ++episode) {
    MetricsRow row;
    row.seed = seed;
    row.episode = episode;
    double sums[3] = {0.0, 0.0, 0.0};
    int steps = 0;
    if (agent.learns()) {
      Observation obs = env.reset();
      agent.begin_episode();
      Eigen::VectorXd x = agent::normalize_obs(obs, net);
      for (int t = 0; t < tc.slots; ++t) {
        const auto decision = agent.act(x, agent::ActMode::explore, act_rng);
        const auto outcome = env.step(decision.action);
        Eigen::VectorXd next = agent::normalize_obs(outcome.next_obs, net);
        replay.push_step({x, decision.record, static_cast<double>(outcome.reward), next});
        x = std::move(next);
        if ((t + 1) % tc.train_every == 0) {
          if (const auto m = agent.train_step(replay, episode, train_rng)) {
            sums[0] += m->critic1_loss;
            sums[1] += m->critic2_loss;
            sums[2] += m->actor_loss;
            ++steps;
          }
        }
      }
      replay.end_episode();
    }
    row.critic1_loss = steps ? sums[0] / steps : kNaN;
    row.critic2_loss = steps ? sums[1] / steps : kNaN;
    row.actor_loss = steps ? sums[2] / steps : kNaN;

    if (episode % config.eval_every == 0) {
      const auto r = evaluate_episode(agent, net, tc.slots, eval_env_seed(seed, episode), eval_act_seed(seed, episode),
                                      config.deterministic_eval);
      row.eval_avg_reward = r.avg_reward;
      row.mre = r.mre;
    } else {
      row.eval_avg_reward = kNaN;
      row.mre.assign(static_cast<std::size_t>(net.num_csps()), kNaN);
    }
    if (log != nullptr && (episode % 10 == 0 || episode == tc.episodes)) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      *log << config.algorithm << " seed " << seed << " episode " << episode << "/" << tc.episodes << " eval "
           << num(row.eval_avg_reward) << " elapsed " << static_cast<long>(secs) << "s\n"
           << std::flush;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TrainingResult run_training(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  TrainingResult result;
  std::ofstream metrics;
  if (!config.metrics_path.empty()) {
    metrics.open(config.metrics_path);
    if (!metrics) throw std::runtime_error("cannot open metrics file " + config.metrics_path);
    metrics << metrics_header(config.network.num_csps()) << '\n';
  }
  for (auto seed : config.seeds) {
    auto agent = make_agent(config, RunStreams::from_seed(seed).init);
    auto rows = train_seed(config, seed, *agent, log);
    for (const auto& row : rows) {
      if (metrics.is_open()) metrics << format_row(row) << '\n';
    }
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    if (!config.checkpoint_path.empty()) {
      const auto path = checkpoint_for_seed(config.checkpoint_path, seed);
      nn::save_checkpoint(path, checkpoint_of(*agent, config, seed));
      result.checkpoints.push_back(path);
    }
  }
  if (metrics.is_open()) {
    metrics.flush();
    if (!metrics) throw std::runtime_error("failed writing metrics file " + config.metrics_path);
  }
  return result;
}

EvalSummary evaluate_agent(agent::Agent& agent, const ExperimentConfig& config, std::uint64_t seed, int episodes,
                           bool deterministic) {
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  EvalSummary s;
  s.episodes = episodes;
  s.mean_mre.assign(static_cast<std::size_t>(config.network.num_csps()), 0.0);
  const std::uint64_t base = derive_seed(seed, 7);
  for (int i = 1; i <= episodes; ++i) {
    const auto r = evaluate_episode(agent, config.network, config.train.slots,
                                    derive_seed(base, 2 * static_cast<std::uint64_t>(i)),
                                    derive_seed(base, 2 * static_cast<std::uint64_t>(i) + 1), deterministic);
    s.rewards.push_back(r.avg_reward);
    for (std::size_t k = 0; k < s.mean_mre.size(); ++k) s.mean_mre[k] += r.mre[k] / episodes;
  }
  double sum = 0.0;
  for (double r : s.rewards) sum += r;
  s.mean_reward = sum / episodes;
  double ss = 0.0;
  for (double r : s.rewards) ss += (r - s.mean_reward) * (r - s.mean_reward);
  s.sd_reward = episodes > 1 ? std::sqrt(ss / (episodes - 1)) : 0.0;
  return s;
}

EvalSummary run_evaluation(const std::string& checkpoint, const ExperimentConfig& config, int episodes,
                           bool deterministic) {
  config.validate();
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  const std::uint64_t seed = config.seeds.front();
  auto agent = make_agent(config, RunStreams::from_seed(seed).init);
  if (agent->learns()) agent->load(nn::load_checkpoint(checkpoint));
  return evaluate_agent(*agent, config, seed, episodes, deterministic);
}

double last_mean(const std::vector<MetricsRow>& rows, int count) {
  std::map<std::uint64_t, std::vector<double>> by_seed;
  for (const auto& r : rows) {
    if (!std::isnan(r.eval_avg_reward)) by_seed[r.seed].push_back(r.eval_avg_reward);
  }
  if (by_seed.empty()) return kNaN;
  double total = 0.0;
  for (const auto& [seed, values] : by_seed) {
    const std::size_t n = std::min(values.size(), static_cast<std::size_t>(count));
    double s = 0.0;
    for (std::size_t i = values.size() - n; i < values.size(); ++i) s += values[i];
    total += s / static_cast<double>(n);
  }
  return total / static_cast<double>(by_seed.size());
}

void retain_heap_memory() {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
}

}  // namespace aoci::harness
