#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "aoci/agent/agent.hpp"
#include "aoci/harness/experiment.hpp"

namespace aoci::harness {

/// One line of the metrics file. Losses are means over the training steps of
/// the episode and NaN when there were none.
struct MetricsRow {
  std::uint64_t seed = 0;
  int episode = 0;
  double eval_avg_reward = 0.0;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  std::vector<double> mre;  // per sensor set
};

struct EpisodeResult {
  double avg_reward = 0.0;
  std::vector<double> mre;  // mean over slots of the per-set minimum battery at slot start
};

/// Independent random streams of one run.
struct RunStreams {
  std::uint64_t env;
  std::uint64_t act;
  std::uint64_t train;
  std::uint64_t init;

  static RunStreams from_seed(std::uint64_t seed);
};

std::unique_ptr<agent::Agent> make_agent(const ExperimentConfig& config, std::uint64_t init_seed);

/// A full evaluation episode with a fresh environment; the agent's recurrent
/// state is reset but its parameters are untouched.
EpisodeResult evaluate_episode(agent::Agent& agent, const NetworkConfig& network, int slots, std::uint64_t env_seed,
                               std::uint64_t act_seed, bool deterministic);

/// Seed of the evaluation environment after training episode `episode`.
std::uint64_t eval_env_seed(std::uint64_t run_seed, int episode);
std::uint64_t eval_act_seed(std::uint64_t run_seed, int episode);

/// Header line of the metrics file.
std::string metrics_header(int num_sets);
/// A row at 17 significant digits, "nan" for missing values.
std::string format_row(const MetricsRow& row);

struct TrainingResult {
  std::vector<MetricsRow> rows;
  std::vector<std::string> checkpoints;
};

/// Trains every seed of `config` in turn, evaluating after every
/// `eval_every` episodes. Writes the metrics file and per-seed checkpoints
/// when their paths are set. Progress lines go to `log` when non-null.
TrainingResult run_training(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Trains a single seed and returns its rows.
std::vector<MetricsRow> train_seed(const ExperimentConfig& config, std::uint64_t seed, agent::Agent& agent,
                                   std::ostream* log = nullptr);

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0.0;
  double sd_reward = 0.0;
  std::vector<double> mean_mre;
  std::vector<double> rewards;
};

/// Loads `checkpoint` (ignored for the random policy) and runs `episodes`
/// evaluation episodes seeded from the first configured seed.
EvalSummary run_evaluation(const std::string& checkpoint, const ExperimentConfig& config, int episodes,
                           bool deterministic);
EvalSummary evaluate_agent(agent::Agent& agent, const ExperimentConfig& config, std::uint64_t seed, int episodes,
                           bool deterministic);

/// Mean of the last `count` evaluation rewards of every seed, averaged over seeds.
double last_mean(const std::vector<MetricsRow>& rows, int count);

/// Keeps freed training buffers in the heap instead of returning them to the
/// kernel; repeated large batch allocations then avoid page faults.
void retain_heap_memory();

}  // namespace aoci::harness
