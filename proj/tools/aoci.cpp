// Command-line front end: enumerate, train, eval, simulate, gradcheck, oracle.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoci/actspace.hpp"
#include "aoci/harness/experiment.hpp"
#include "aoci/harness/oracle.hpp"
#include "aoci/harness/runner.hpp"
#include "aoci/nn/gradcheck.hpp"

using namespace aoci;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> slots;
  std::optional<int> train_every;
  std::optional<std::string> algorithm;
  std::optional<std::string> metrics;
  std::optional<std::string> checkpoint;
  bool deterministic_eval = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--episodes", o.episodes, "Number of episodes");
  cmd->add_option("--slots", o.slots, "Slots per episode");
  cmd->add_flag("--deterministic-eval", o.deterministic_eval, "Evaluate with the policy mean / greedy action");
}

harness::ExperimentConfig configure(const std::string& path, const Overrides& o) {
  auto c = harness::load_config(path);
  if (o.seed) c.seeds = {*o.seed};
  if (o.episodes) c.train.episodes = *o.episodes;
  if (o.slots) c.train.slots = *o.slots;
  if (o.train_every) c.train.train_every = *o.train_every;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (o.metrics) c.metrics_path = *o.metrics;
  if (o.checkpoint) c.checkpoint_path = *o.checkpoint;
  if (o.deterministic_eval) c.deterministic_eval = true;
  c.validate();
  return c;
}

std::string set_string(const Subspace& sub, const Indicators& element) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < element.size(); ++i) {
    if (!element[i]) continue;
    s += (first ? "" : ",") + std::to_string(sub.sensors[i]);
    first = false;
  }
  return s + "}";
}

int cmd_enumerate(const std::string& path) {
  const auto c = harness::load_config(path);
  const auto spaces = build_action_spaces(c.network);
  for (const auto& sub : spaces.subspaces) {
    std::cout << "csp " << sub.csp << " size " << sub.size() << "\n";
    for (std::size_t i = 0; i < sub.size(); ++i) std::cout << "  " << i << " " << set_string(sub, sub.elements[i]) << "\n";
  }
  std::cout << "total_valid " << spaces.total_valid << "\n";
  return 0;
}

int cmd_train(const std::string& path, const Overrides& o, bool quiet) {
  const auto c = configure(path, o);
  const auto result = harness::run_training(c, quiet ? nullptr : &std::cerr);
  std::printf("last-50 mean evaluation reward: %.6f\n", harness::last_mean(result.rows, 50));
  if (!c.metrics_path.empty()) std::printf("metrics: %s\n", c.metrics_path.c_str());
  for (const auto& cp : result.checkpoints) std::printf("checkpoint: %s\n", cp.c_str());
  return 0;
}

void print_summary(const harness::EvalSummary& s) {
  std::printf("episodes %d\nmean_reward %.6f\nsd_reward %.6f\n", s.episodes, s.mean_reward, s.sd_reward);
  for (std::size_t k = 0; k < s.mean_mre.size(); ++k) std::printf("mre_%zu %.6f\n", k + 1, s.mean_mre[k]);
}

int cmd_eval(const std::string& path, const std::string& checkpoint, const Overrides& o, int episodes) {
  const auto c = configure(path, o);
  print_summary(harness::run_evaluation(checkpoint, c, episodes, c.deterministic_eval));
  return 0;
}

int cmd_simulate(const std::string& path, const Overrides& o, int episodes) {
  auto c = configure(path, o);
  c.algorithm = "random";
  auto agent = harness::make_agent(c, 0);
  print_summary(harness::evaluate_agent(*agent, c, c.seeds.front(), episodes, false));
  return 0;
}

int cmd_gradcheck(double tol, std::uint64_t seed, int steps) {
  Rng rng(seed);
  nn::RecurrentNet net({5, 6, 4, 3});
  net.init_he(rng);
  nn::GradCheckOptions opts;
  opts.steps = steps;
  const auto report = nn::grad_check(net, tol, rng, opts);
  for (const auto& b : report.blocks) std::printf("%-14s max_rel_error %.3e\n", b.block.c_str(), b.max_rel_error);
  std::printf("checked %ld parameters, worst %.3e at %s: %s\n", static_cast<long>(report.checked),
              report.max_rel_error, report.worst.c_str(), report.passed ? "PASS" : "FAIL");
  return report.passed ? 0 : 1;
}

int cmd_oracle(const std::string& path, std::optional<double> alpha_override, std::optional<double> gamma_override,
               double tol) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  const auto j = nlohmann::json::parse(in);
  const auto network = harness::parse_network_config(j.at("network"));
  const auto o = j.contains("oracle") ? j["oracle"] : nlohmann::json::object();
  const double alpha = alpha_override.value_or(o.value("alpha", 0.02));
  const double gamma = gamma_override.value_or(o.value("gamma", network.discount));
  const double prob = o.value("schedule_prob", 0.5);
  // The policy schedules every sensor of the network at once.
  ValidAction all{Indicators(static_cast<std::size_t>(network.num_sensors()), 1)};
  const auto policy = harness::schedule_with_probability(all, prob);
  const auto r = harness::oracle_soft_values(network, policy, gamma, alpha, tol);
  std::printf("states %zu horizon %d alpha %g gamma %g\n", r.states, r.horizon, alpha, gamma);
  std::printf("linear vs series    %.3e\n", r.max_discrepancy);
  std::printf("recursion residual  %.3e\n", r.recursion_residual);
  std::printf("linear vs iterative %.3e\n", r.iterative_discrepancy);
  std::printf("V(reset) %.9f\n%s (tolerance %.1e)\n", r.value[0], r.passed ? "PASS" : "FAIL", tol);
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-correlated-information scheduling: simulator, learners and checks"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path;
  Overrides o;
  bool quiet = false;
  int eval_episodes = 50;
  double tol = 1e-4;
  std::uint64_t gc_seed = 1;
  int gc_steps = 50;
  std::optional<double> alpha, gamma;
  double oracle_tol = 1e-6;

  auto* enumerate = app.add_subcommand("enumerate", "Print the per-CSP subspaces and the valid-action count");
  enumerate->add_option("config", config_path)->required()->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train", "Train and evaluate every configured seed");
  train->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  add_common(train, o);
  train->add_option("--train-every", o.train_every, "Slots between training steps");
  train->add_option("--algorithm", o.algorithm, "rss | rss-woa | drqn | random");
  train->add_option("--metrics", o.metrics, "Metrics CSV path");
  train->add_option("--checkpoint", o.checkpoint, "Checkpoint path ({seed} is substituted)");
  train->add_flag("--quiet", quiet, "No progress lines");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  eval->add_option("checkpoint", checkpoint_path)->required();
  add_common(eval, o);
  eval->add_option("--algorithm", o.algorithm, "rss | rss-woa | drqn | random");
  eval->add_option("--eval-episodes", eval_episodes, "Evaluation episodes")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Roll out the random policy");
  simulate->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  add_common(simulate, o);
  simulate->add_option("--eval-episodes", eval_episodes, "Episodes")->capture_default_str();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the recurrent network");
  gradcheck->add_option("--tol", tol, "Relative error tolerance")->capture_default_str();
  gradcheck->add_option("--seed", gc_seed, "Seed")->capture_default_str();
  gradcheck->add_option("--steps", gc_steps, "Sequence length")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Exact soft values on a tiny instance");
  oracle->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  oracle->add_option("--alpha", alpha, "Temperature");
  oracle->add_option("--gamma", gamma, "Discount");
  oracle->add_option("--tol", oracle_tol, "Tolerance")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  harness::retain_heap_memory();

  try {
    if (*enumerate) return cmd_enumerate(config_path);
    if (*train) return cmd_train(config_path, o, quiet);
    if (*eval) return cmd_eval(config_path, checkpoint_path, o, eval_episodes);
    if (*simulate) return cmd_simulate(config_path, o, eval_episodes);
    if (*gradcheck) return cmd_gradcheck(tol, gc_seed, gc_steps);
    if (*oracle) return cmd_oracle(config_path, alpha, gamma, oracle_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
