#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "aoci/agent/rss.hpp"
#include "aoci/env.hpp"
#include "aoci/harness/experiment.hpp"
#include "aoci/harness/oracle.hpp"
#include "aoci/harness/runner.hpp"

using namespace aoci;
using namespace aoci::harness;
using nlohmann::json;

namespace {

const std::string kConfigs = AOCI_SOURCE_DIR "/configs/";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("aoci_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_run(const std::string& algorithm) {
  auto c = parse_config(json::parse(R"({
    "network": {"csps": 2, "threshold": 1.0},
    "train": {"start_episode": 3, "batch_episodes": 2, "seq_len": 8, "episodes": 5, "slots": 30,
              "dense": 8, "hidden": 8, "train_every": 3},
    "seeds": [3, 4]
  })"));
  c.algorithm = algorithm;
  return c;
}

}  // namespace

TEST(Config, DefaultK3) {
  const auto c = load_config(kConfigs + "default_k3.json");
  EXPECT_EQ(c.network.num_sensors(), 12);
  EXPECT_EQ(c.network.g_max, 144);
  EXPECT_EQ(c.network.x_max, 144);
  EXPECT_EQ(c.network.aoci_max, 72);
  EXPECT_EQ(c.network.channels, 2);
  EXPECT_EQ(c.train.slots, 1000);
  EXPECT_EQ(c.train.episodes, 500);
  EXPECT_EQ(c.seeds.size(), 6u);
}

TEST(Config, DefaultK7) { EXPECT_EQ(load_config(kConfigs + "default_k7.json").network.num_sensors(), 28); }

TEST(Config, ShippedFilesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
    if (entry.path().filename() == "tiny_oracle.json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

TEST(Config, MinimalMatchesDefaultNetwork) {
  const auto c = parse_config(json::parse(R"({"network": {"csps": 3, "threshold": 1.0}})"));
  const auto d = default_network(3);
  EXPECT_EQ(c.network.sensor_sets, d.sensor_sets);
  EXPECT_EQ(c.network.failure_prob, d.failure_prob);
  EXPECT_EQ(c.network.importance, d.importance);
  EXPECT_EQ(c.network.eh_prob, d.eh_prob);
  EXPECT_EQ(c.network.battery_cap, d.battery_cap);
  EXPECT_EQ(c.network.g_max, d.g_max);
}

TEST(Config, MissingThresholdNamesField) {
  try {
    parse_config(json::parse(R"({"network": {"csps": 3}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("network.threshold"), std::string::npos) << e.what();
  }
}

TEST(Config, Errors) {
  auto fails_on = [](const char* text, const std::string& field) {
    try {
      parse_config(json::parse(text));
      ADD_FAILURE() << "accepted " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  fails_on(R"({"network": {"csps": 3, "threshold": 1.0, "colour": 1}})", "network.colour");
  fails_on(R"({"network": {"csps": 3, "threshold": 1.0}, "seeds": []})", "seeds");
  fails_on(R"({"network": {"csps": 3, "threshold": 1.0}, "algorithm": "ppo"})", "algorithm");
  fails_on(R"({"network": {"csps": 3, "threshold": 1.0}, "train": {"seq_len": "long"}})", "train.seq_len");
  fails_on(R"({"network": {"csps": 2, "threshold": [1.0, 1.0, 1.0]}})", "network.threshold");
  fails_on(R"({"network": {"csps": 2, "threshold": 1.0, "failure_prob": [0.1, 0.2]}})", "network.failure_prob");
  fails_on(R"({"network": {"csps": 2, "threshold": 1.0}, "train": {"start_episode": 2}})", "start_episode");
}

TEST(Config, HeterogeneousFifthSet) {
  for (int size = 3; size <= 8; ++size) {
    json j = {{"network", {{"threshold", 1.0}, {"eh_prob", 0.6}}}};
    std::vector<std::vector<int>> sets;
    int next = 0;
    for (int k = 0; k < 5; ++k) {
      const int m = k < 4 ? 4 : size;
      std::vector<int> set;
      for (int i = 0; i < m; ++i) set.push_back(next++);
      sets.push_back(set);
    }
    j["network"]["sensor_sets"] = sets;
    const auto c = parse_config(j);
    EXPECT_EQ(c.network.num_sensors(), 16 + size);
    EXPECT_EQ(c.network.sensor_sets[4].size(), static_cast<std::size_t>(size));
  }
}

TEST(Metrics, HeaderAndFormatting) {
  EXPECT_EQ(metrics_header(2), "seed,episode,eval_avg_reward,critic1_loss,critic2_loss,actor_loss,mre_1,mre_2");
  MetricsRow row{7, 3, -0.1, std::nan(""), 2.5, -1.0, {1.0 / 3.0, 20.0}};
  EXPECT_EQ(format_row(row), "7,3,-0.10000000000000001,nan,2.5,-1,0.33333333333333331,20");
}

TEST(Training, RandomPolicyEvaluatesOnly) {
  auto c = small_run("random");
  const auto result = run_training(c);
  ASSERT_EQ(result.rows.size(), 10u);
  for (const auto& r : result.rows) {
    EXPECT_TRUE(std::isnan(r.critic1_loss));
    EXPECT_TRUE(std::isnan(r.actor_loss));
    EXPECT_LE(r.eval_avg_reward, -1.0);
    EXPECT_GE(r.eval_avg_reward, -c.network.aoci_max);
  }
}

TEST(Training, SameSeedSameMetricsFile) {
  for (const std::string algorithm : {"rss", "drqn"}) {
    auto c = small_run(algorithm);
    c.metrics_path = temp_path(algorithm + "_a.csv");
    run_training(c);
    c.metrics_path = temp_path(algorithm + "_b.csv");
    run_training(c);
    const auto a = slurp(temp_path(algorithm + "_a.csv"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(temp_path(algorithm + "_b.csv")));
    // Two seeds of five episodes plus the header.
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 11);
  }
}

TEST(Training, LossesAppearAfterStartEpisode) {
  const auto result = run_training(small_run("rss"));
  for (const auto& r : result.rows) {
    EXPECT_EQ(std::isnan(r.critic1_loss), r.episode <= 3) << r.episode;
  }
}

TEST(Evaluation, LeavesParametersUntouched) {
  auto c = small_run("rss");
  auto agent = make_agent(c, 1);
  auto& rss = dynamic_cast<agent::RssAgent&>(*agent);
  const auto before = rss.actor().params();
  evaluate_agent(*agent, c, 1, 2, false);
  EXPECT_EQ(rss.actor().params(), before);
}

TEST(Evaluation, CheckpointRoundTripAndModes) {
  auto c = small_run("rss");
  c.seeds = {5};
  c.checkpoint_path = temp_path("ckpt_{seed}.bin");
  const auto result = run_training(c);
  ASSERT_EQ(result.checkpoints.size(), 1u);
  EXPECT_EQ(result.checkpoints[0], temp_path("ckpt_5.bin"));
  const auto s1 = run_evaluation(result.checkpoints[0], c, 3, true);
  const auto s2 = run_evaluation(result.checkpoints[0], c, 3, true);
  EXPECT_EQ(s1.rewards, s2.rewards);
  const auto stochastic = run_evaluation(result.checkpoints[0], c, 3, false);
  EXPECT_NE(stochastic.rewards, s1.rewards);
  EXPECT_THROW(run_evaluation(result.checkpoints[0], c, 0, false), std::invalid_argument);
  auto wider = c;
  wider.train.hidden = 16;
  EXPECT_THROW(run_evaluation(result.checkpoints[0], wider, 1, false), nn::CheckpointError);
}

TEST(Evaluation, RandomPolicyNearReportedBaseline) {
  auto c = load_config(kConfigs + "default_k3.json");
  c.algorithm = "random";
  const auto s = run_evaluation("", c, 50, false);
  EXPECT_GE(s.mean_reward, -55.0);
  EXPECT_LE(s.mean_reward, -33.0);
  EXPECT_EQ(s.rewards.size(), 50u);
}

TEST(Oracle, TinyInstanceAgrees) {
  const auto net = tiny_oracle_network();
  const auto policy = schedule_with_probability(ValidAction{{1}}, 0.5);
  const auto r = oracle_soft_values(net, policy, 0.9, 0.02, 1e-6);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_discrepancy, 1e-6);
  EXPECT_LE(r.recursion_residual, 1e-9);
  EXPECT_LE(r.iterative_discrepancy, 1e-6);
  EXPECT_GT(r.states, 10u);
}

TEST(Oracle, EntropyShiftsValuesByConstant) {
  // A memoryless policy earns the same entropy bonus every slot.
  const auto net = tiny_oracle_network();
  const auto policy = schedule_with_probability(ValidAction{{1}}, 0.3);
  const auto plain = oracle_soft_values(net, policy, 0.9, 0.0, 1e-6);
  const auto soft = oracle_soft_values(net, policy, 0.9, 0.5, 1e-6);
  ASSERT_TRUE(plain.passed && soft.passed);
  const double shift = 0.5 * soft.entropy / (1.0 - 0.9);
  EXPECT_LE(((soft.value - plain.value).array() - shift).abs().maxCoeff(), 1e-9);
}

TEST(Oracle, PlainEvaluationMatchesMonteCarlo) {
  const auto net = tiny_oracle_network();
  const auto policy = schedule_with_probability(ValidAction{{1}}, 0.5);
  const auto r = oracle_soft_values(net, policy, 0.9, 0.0, 1e-6);
  Environment env(net, 77);
  Rng pick(78);
  const int rollouts = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < rollouts; ++i) {
    env.reset();
    double ret = 0.0, discount = 1.0;
    for (int t = 0; t < 250; ++t) {
      const bool send = uniform01(pick) < 0.5;
      ret += discount * env.step(send ? ValidAction{{1}} : silent_action(1)).reward;
      discount *= 0.9;
    }
    sum += ret;
    sq += ret * ret;
  }
  const double mean = sum / rollouts;
  const double se = std::sqrt((sq / rollouts - mean * mean) / rollouts);
  EXPECT_NEAR(r.value[0], mean, 5.0 * se) << "se " << se;
}

TEST(Oracle, MyopicLimit) {
  const auto net = tiny_oracle_network();
  const auto policy = schedule_with_probability(ValidAction{{1}}, 0.5);
  const auto r = oracle_soft_values(net, policy, 0.0, 0.02, 1e-6);
  EXPECT_TRUE(r.passed);
  for (Eigen::Index s = 0; s < r.value.size(); ++s) {
    const double expected = 0.5 * r.reward(s, 0) + 0.5 * r.reward(s, 1) + 0.02 * r.entropy;
    EXPECT_NEAR(r.value[s], expected, 1e-12);
    EXPECT_NEAR(r.action_value(s, 0), r.reward(s, 0), 1e-12);
  }
  EXPECT_NEAR(r.entropy, std::log(2.0), 1e-15);
}

TEST(Oracle, RefusesLargeChains) {
  const auto policy = schedule_with_probability(ValidAction{{1}}, 0.5);
  EXPECT_THROW(oracle_soft_values(tiny_oracle_network(), policy, 0.9, 0.02, 1e-6, 10), StateSpaceTooLarge);
}
