// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance [--criteria 1,2,3] [--paper-scale] [--aoci <binary>] [--configs <dir>]
//
// Criteria 6 and 7 train learners on the reduced preset unless --paper-scale
// is given, in which case the full six-seed, 500-episode runs are used.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aoci/actspace.hpp"
#include "aoci/harness/experiment.hpp"
#include "aoci/harness/oracle.hpp"
#include "aoci/harness/runner.hpp"
#include "aoci/nn/gradcheck.hpp"
#include "env_reference.hpp"
#include "references.hpp"

using namespace aoci;

namespace {

// Pinned tolerances and budgets.
constexpr double kGradTolerance = 1e-4;
constexpr double kOracleTolerance = 1e-6;
constexpr long kEnvSteps = 100000;
constexpr double kBudgetCounts = 1.0;      // seconds
constexpr double kBudgetSubspace = 1.0;    // seconds
constexpr double kBudgetEnv = 30.0;        // seconds
constexpr double kBudgetGradients = 120.0; // seconds
constexpr double kBudgetOracle = 60.0;     // seconds
constexpr double kReducedFactor = 3.0;     // RSS at least this many times better than random
constexpr double kPaperFactor = 4.0;
constexpr double kPaperRssFloor = -8.0;
constexpr double kRandomLow = -55.0;
constexpr double kRandomHigh = -33.0;
constexpr int kLastEpisodes = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Context {
  std::string aoci;
  std::string configs;
  bool paper_scale = false;
  std::map<std::string, double> learned;  // algorithm -> last-50 mean
};

Outcome counts() {
  const auto k3 = build_action_spaces(default_network(3));
  const bool products = k3.total_valid == 344 && build_action_spaces(default_network(5)).total_valid == 16808 &&
                        build_action_spaces(default_network(7)).total_valid == 823544;
  std::set<ValidAction> image;
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      for (std::size_t c = 0; c < 8; ++c) image.insert(map_to_valid(ProtoAction{{a, b, c}}, k3));
    }
  }
  return {products && image.size() == 344,
          "K=3/5/7 products " + std::string(products ? "344/16808/823544" : "wrong") + ", 8^3 image " +
              std::to_string(image.size())};
}

Outcome subspace() {
  const std::vector<double> d{0.4, 0.6, 0.8, 1.0};
  const std::vector<int> sensors{0, 1, 2, 3};
  const auto sub = enumerate_subspace(0, sensors, d, 2, 1.0);
  const auto brute = ref::brute_force_subsets(d, 2, 1.0);
  return {sub.size() == 8 && sub.elements == brute, "size " + std::to_string(sub.size()) + ", brute force over 16 subsets " +
                                                        (sub.elements == brute ? "agrees" : "disagrees")};
}

Outcome environment() {
  const auto r = ref::run_env_properties(20240601, kEnvSteps);
  std::string detail = std::to_string(r.steps) + " steps, " + std::to_string(r.total()) + " violations";
  if (!r.first_failures.empty()) detail += " (first: " + r.first_failures.front() + ")";
  return {r.total() == 0 && r.steps == kEnvSteps, detail};
}

Outcome gradients() {
  Rng rng(4);
  std::string detail;
  bool ok = true;
  auto record = [&](const std::string& name, const nn::GradCheckReport& r) {
    ok = ok && r.passed;
    detail += name + fmt(" %.1e ", r.max_rel_error);
  };
  {
    nn::RecurrentNet net({5, 6, 4, 3});
    net.init_he(rng);
    nn::GradCheckOptions opts;
    opts.trials = 1;
    opts.steps = 50;
    record("stack(L=50)", nn::grad_check(net, kGradTolerance, rng, opts));
  }
  record("squash", ref::check_squash_gradient(5, kGradTolerance));
  record("critic", ref::check_critic_loss_gradient(11, kGradTolerance));
  record("actor", ref::check_actor_loss_gradient(12, kGradTolerance));
  record("drqn", ref::check_drqn_loss_gradient(13, kGradTolerance));
  return {ok, detail + fmt("(tol %.0e)", kGradTolerance)};
}

Outcome oracle() {
  const auto net = harness::tiny_oracle_network();
  const auto policy = harness::schedule_with_probability(ValidAction{{1}}, 0.5);
  bool ok = true;
  std::string detail;
  for (const auto& [alpha, gamma] : {std::pair{0.02, 0.9}, {0.0, 0.9}, {0.02, 0.0}}) {
    const auto r = harness::oracle_soft_values(net, policy, gamma, alpha, kOracleTolerance);
    ok = ok && r.passed;
    detail += fmt("a=%g g=%g: %.1e; ", alpha, gamma, std::max(r.max_discrepancy, r.iterative_discrepancy));
  }
  return {ok, detail + std::to_string(harness::oracle_soft_values(net, policy, 0.9, 0.02, 1.0).states) + " states"};
}

harness::ExperimentConfig learning_config(const Context& ctx, const std::string& algorithm) {
  auto c = harness::load_config(ctx.configs + (ctx.paper_scale ? "/default_k3.json" : "/ci_k3.json"));
  c.algorithm = algorithm;
  c.metrics_path.clear();
  c.checkpoint_path.clear();
  return c;
}

double learned(Context& ctx, const std::string& algorithm) {
  auto it = ctx.learned.find(algorithm);
  if (it != ctx.learned.end()) return it->second;
  const auto result = harness::run_training(learning_config(ctx, algorithm), &std::cerr);
  return ctx.learned[algorithm] = harness::last_mean(result.rows, kLastEpisodes);
}

Outcome efficacy(Context& ctx) {
  const double random = learned(ctx, "random");
  const double rss = learned(ctx, "rss");
  const double factor = ctx.paper_scale ? kPaperFactor : kReducedFactor;
  bool ok = rss * factor >= random;  // both negative: |rss| * factor <= |random|
  std::string detail = fmt("rss %.3f, random %.3f, ratio %.2f (need >= %.1f)", rss, random, random / rss, factor);
  if (ctx.paper_scale) {
    const bool band = random >= kRandomLow && random <= kRandomHigh;
    ok = ok && rss >= kPaperRssFloor && band;
    detail += fmt(", rss floor %.1f, random band [%.0f, %.0f]", kPaperRssFloor, kRandomLow, kRandomHigh);
  }
  return {ok, detail + (ctx.paper_scale ? " [paper scale]" : " [reduced preset]")};
}

Outcome drqn(Context& ctx) {
  const double random = learned(ctx, "random");
  const double rss = learned(ctx, "rss");
  const double q = learned(ctx, "drqn");
  return {q > random && q < rss, fmt("random %.3f < drqn %.3f < rss %.3f", random, q, rss)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const Context& ctx) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "aoci_acceptance";
  fs::create_directories(dir);
  std::string files[2];
  for (int i = 0; i < 2; ++i) {
    files[i] = (dir / ("metrics_" + std::to_string(i) + ".csv")).string();
    const std::string cmd = "\"" + ctx.aoci + "\" train \"" + ctx.configs +
                            "/ci_k3.json\" --seed 11 --episodes 23 --slots 120 --quiet --metrics \"" + files[i] +
                            "\" --checkpoint \"" + (dir / "det.ckpt").string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "train command failed: " + cmd};
  }
  const auto a = read_file(files[0]);
  const auto b = read_file(files[1]);
  // The final rows come from training episodes, so their losses are numbers.
  const auto last = a.substr(a.rfind('\n', a.size() - 2) + 1);
  const bool trained = !a.empty() && last.find("nan") == std::string::npos;
  return {a == b && trained, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string criteria = "1,2,3,4,5,6,7,8";
  Context ctx;
  ctx.aoci = AOCI_BINARY;
  ctx.configs = AOCI_SOURCE_DIR "/configs";
  app.add_option("--criteria", criteria, "Comma-separated criterion numbers")->capture_default_str();
  app.add_flag("--paper-scale", ctx.paper_scale, "Criteria 6-7 at the full six-seed, 500-episode scale");
  app.add_option("--aoci", ctx.aoci, "Path of the aoci executable");
  app.add_option("--configs", ctx.configs, "Directory holding the shipped configs");
  CLI11_PARSE(app, argc, argv);
  harness::retain_heap_memory();

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> table = {
      {1, {"valid-action counts", counts}},
      {2, {"subspace oracle", subspace}},
      {3, {"environment properties", environment}},
      {4, {"gradient exactness", gradients}},
      {5, {"soft-value oracle", oracle}},
      {6, {"learning efficacy", [&] { return efficacy(ctx); }}},
      {7, {"drqn ordering", [&] { return drqn(ctx); }}},
      {8, {"determinism", [&] { return determinism(ctx); }}},
  };
  const std::map<int, double> budgets = {
      {1, kBudgetCounts}, {2, kBudgetSubspace}, {3, kBudgetEnv}, {4, kBudgetGradients}, {5, kBudgetOracle}};

  int failures = 0;
  std::stringstream list(criteria);
  for (std::string item; std::getline(list, item, ',');) {
    const int id = std::stoi(item);
    const auto it = table.find(id);
    if (it == table.end()) {
      std::printf("criterion %d: unknown\n", id);
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->second.second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (const auto b = budgets.find(id); b != budgets.end() && secs > b->second) {
      out.pass = false;
      out.detail += fmt(" (over the %.0fs budget)", b->second);
    }
    std::printf("%s criterion %d %-24s %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", id, it->second.first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
