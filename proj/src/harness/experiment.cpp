#include "aoci/harness/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace aoci::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& scope, const std::set<std::string>& known) {
  if (!obj.is_object()) fail(scope, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(scope.empty() ? key : scope + "." + key, "unknown key");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& field, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(field, std::string("wrong type (") + e.what() + ")");
  }
}

/// Scalar broadcast or an explicit per-entry list.
template <typename T>
std::vector<T> per_entry(const json& value, const std::string& field, std::size_t count) {
  try {
    if (value.is_array()) {
      auto out = value.get<std::vector<T>>();
      if (out.size() != count) {
        fail(field, "has " + std::to_string(out.size()) + " entries, expected " + std::to_string(count));
      }
      return out;
    }
    return std::vector<T>(count, value.get<T>());
  } catch (const json::exception& e) {
    fail(field, std::string("wrong type (") + e.what() + ")");
  }
}

}  // namespace

NetworkConfig parse_network_config(const json& j) {
  reject_unknown(j, "network",
                 {"csps", "sensor_sets", "channels", "failure_prob", "eh_prob", "battery_cap", "importance",
                  "threshold", "g_max", "x_max", "aoci_max", "discount"});
  static constexpr double kFailure[] = {0.05, 0.10, 0.15, 0.20};
  static constexpr double kImportance[] = {0.4, 0.6, 0.8, 1.0};

  NetworkConfig c;
  if (j.contains("sensor_sets")) {
    c.sensor_sets = get<std::vector<std::vector<int>>>(j, "sensor_sets", "network.sensor_sets", {});
    if (j.contains("csps") && get<int>(j, "csps", "network.csps", 0) != c.num_csps()) {
      fail("network.csps", "disagrees with the number of sensor_sets");
    }
  } else {
    if (!j.contains("csps")) fail("network.csps", "required when sensor_sets is absent");
    const int k = get<int>(j, "csps", "network.csps", 0);
    if (k < 1) fail("network.csps", "must be positive");
    for (int i = 0; i < k; ++i) c.sensor_sets.push_back({4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3});
  }

  std::size_t n = 0;
  for (const auto& set : c.sensor_sets) n += set.size();
  // Position of every sensor inside its set drives the default patterns.
  std::vector<std::size_t> position(n, 0);
  for (const auto& set : c.sensor_sets) {
    for (std::size_t p = 0; p < set.size(); ++p) {
      if (set[p] < 0 || static_cast<std::size_t>(set[p]) >= n) {
        fail("network.sensor_sets", "index " + std::to_string(set[p]) + " out of range");
      }
      position[static_cast<std::size_t>(set[p])] = p;
    }
  }

  c.channels = get<int>(j, "channels", "network.channels", 2);
  if (j.contains("failure_prob")) {
    c.failure_prob = per_entry<double>(j["failure_prob"], "network.failure_prob", n);
  } else {
    for (std::size_t s = 0; s < n; ++s) c.failure_prob.push_back(kFailure[position[s] % 4]);
  }
  if (j.contains("importance")) {
    c.importance = per_entry<double>(j["importance"], "network.importance", n);
  } else {
    for (std::size_t s = 0; s < n; ++s) c.importance.push_back(kImportance[position[s] % 4]);
  }
  c.eh_prob = j.contains("eh_prob") ? per_entry<double>(j["eh_prob"], "network.eh_prob", n) : std::vector<double>(n, 0.2);
  c.battery_cap = j.contains("battery_cap") ? per_entry<int>(j["battery_cap"], "network.battery_cap", n)
                                            : std::vector<int>(n, 20);
  if (!j.contains("threshold")) fail("network.threshold", "missing (one value, or one per CSP)");
  c.threshold = per_entry<double>(j["threshold"], "network.threshold", c.sensor_sets.size());

  apply_default_caps(c);
  c.g_max = get<int>(j, "g_max", "network.g_max", c.g_max);
  c.x_max = get<int>(j, "x_max", "network.x_max", c.x_max);
  c.aoci_max = get<int>(j, "aoci_max", "network.aoci_max", c.aoci_max);
  c.discount = get<double>(j, "discount", "network.discount", 0.99);
  validate(c);
  return c;
}

namespace {

agent::TrainConfig parse_train(const json& j, double discount) {
  reject_unknown(j, "train",
                 {"alpha", "tau", "lr_actor", "lr_critic", "replay_capacity", "start_episode", "batch_episodes",
                  "seq_len", "episodes", "slots", "train_every", "dense", "hidden", "epsilon_start", "epsilon_end",
                  "epsilon_eval", "epsilon_anneal_episodes", "drqn_action_cap"});
  agent::TrainConfig t;
  t.gamma = discount;
  t.alpha = get(j, "alpha", "train.alpha", t.alpha);
  t.tau = get(j, "tau", "train.tau", t.tau);
  t.lr_actor = get(j, "lr_actor", "train.lr_actor", t.lr_actor);
  t.lr_critic = get(j, "lr_critic", "train.lr_critic", t.lr_critic);
  t.replay_capacity = get(j, "replay_capacity", "train.replay_capacity", t.replay_capacity);
  t.start_episode = get(j, "start_episode", "train.start_episode", t.start_episode);
  t.batch_episodes = get(j, "batch_episodes", "train.batch_episodes", t.batch_episodes);
  t.seq_len = get(j, "seq_len", "train.seq_len", t.seq_len);
  t.episodes = get(j, "episodes", "train.episodes", t.episodes);
  t.slots = get(j, "slots", "train.slots", t.slots);
  t.train_every = get(j, "train_every", "train.train_every", t.train_every);
  t.dense = get(j, "dense", "train.dense", t.dense);
  t.hidden = get(j, "hidden", "train.hidden", t.hidden);
  t.epsilon_start = get(j, "epsilon_start", "train.epsilon_start", t.epsilon_start);
  t.epsilon_end = get(j, "epsilon_end", "train.epsilon_end", t.epsilon_end);
  t.epsilon_eval = get(j, "epsilon_eval", "train.epsilon_eval", t.epsilon_eval);
  t.epsilon_anneal_episodes = get(j, "epsilon_anneal_episodes", "train.epsilon_anneal_episodes", t.epsilon_anneal_episodes);
  t.drqn_action_cap = get(j, "drqn_action_cap", "train.drqn_action_cap", t.drqn_action_cap);
  return t;
}

}  // namespace

void ExperimentConfig::validate() const {
  aoci::validate(network);
  train.validate();
  if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algorithm) == kAlgorithms.end()) {
    fail("algorithm", "unknown algorithm '" + algorithm + "'");
  }
  if (seeds.empty()) fail("seeds", "at least one seed is required");
  if (eval_every < 1) fail("eval_every", "must be at least 1");
  if (algorithm != "random" && train.start_episode < train.batch_episodes) {
    fail("train.start_episode", "must be at least batch_episodes so the first batch can be drawn");
  }
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, "", {"network", "train", "algorithm", "seeds", "eval_every", "deterministic_eval", "output"});
  if (!j.contains("network")) fail("network", "missing");
  ExperimentConfig c;
  c.network = parse_network_config(j["network"]);
  c.train = parse_train(j.contains("train") ? j["train"] : json::object(), c.network.discount);
  c.algorithm = get<std::string>(j, "algorithm", "algorithm", c.algorithm);
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    c.seeds = s.is_array() ? get<std::vector<std::uint64_t>>(j, "seeds", "seeds", {})
                           : std::vector<std::uint64_t>{get<std::uint64_t>(j, "seeds", "seeds", 1)};
  }
  c.eval_every = get(j, "eval_every", "eval_every", c.eval_every);
  c.deterministic_eval = get(j, "deterministic_eval", "deterministic_eval", c.deterministic_eval);
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, "output", {"metrics", "checkpoint"});
    c.metrics_path = get<std::string>(o, "metrics", "output.metrics", "");
    c.checkpoint_path = get<std::string>(o, "checkpoint", "output.checkpoint", "");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return parse_config(j);
}

std::string checkpoint_for_seed(const std::string& pattern, std::uint64_t seed) {
  std::string out = pattern;
  const std::string key = "{seed}";
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key)) out.replace(pos, key.size(), std::to_string(seed));
  return out;
}

}  // namespace aoci::harness
