#include <gtest/gtest.h>

#include "aoci/actspace.hpp"
#include "aoci/env.hpp"
#include "env_reference.hpp"

using namespace aoci;

namespace {

NetworkConfig one_set() { return default_network(1); }

ValidAction schedule(std::initializer_list<int> sensors, int n) {
  ValidAction a{Indicators(static_cast<std::size_t>(n), 0)};
  for (int s : sensors) a.schedule[static_cast<std::size_t>(s)] = 1;
  return a;
}

}  // namespace

TEST(Reset, InitialStateAndObservation) {
  const auto [state, obs] = reset(one_set());
  EXPECT_EQ(state.since_delivery, std::vector<int>(4, 0));
  EXPECT_EQ(state.scheduled_count, std::vector<int>(4, 0));
  EXPECT_EQ(state.battery, std::vector<int>(4, 20));
  EXPECT_EQ(state.aoci, 0);
  for (const auto& b : obs.battery) EXPECT_EQ(b, std::optional<int>(20));
}

TEST(Reset, BatteriesEqualCapacity) {
  auto c = one_set();
  c.battery_cap = {1, 1, 1, 1};
  EXPECT_EQ(reset(c).first.battery, std::vector<int>(4, 1));
}

TEST(Reset, Repeatable) {
  const auto c = default_network(3);
  EXPECT_EQ(reset(c), reset(c));
}

TEST(Activation, Examples) {
  EXPECT_FALSE(activation(true, 0).activated);
  EXPECT_EQ(activation(true, 0).residual, 0);
  EXPECT_TRUE(activation(true, 2).activated);
  EXPECT_EQ(activation(true, 2).residual, 1);
  EXPECT_FALSE(activation(false, 5).activated);
  EXPECT_EQ(activation(false, 5).residual, 5);
}

TEST(Importance, Examples) {
  const auto c = one_set();
  auto r = aggregate_importance({0, 1, 0, 1}, c, 0);
  EXPECT_NEAR(r.value, 1.6, 1e-12);
  EXPECT_TRUE(r.met);
  r = aggregate_importance({1, 1, 0, 0}, c, 0);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_TRUE(r.met);
  r = aggregate_importance({1, 0, 0, 0}, c, 0);
  EXPECT_NEAR(r.value, 0.4, 1e-12);
  EXPECT_FALSE(r.met);
}

TEST(Aoci, Examples) {
  EXPECT_EQ(evolve_aoci(5, true, 72), 1);
  EXPECT_EQ(evolve_aoci(5, false, 72), 6);
  EXPECT_EQ(evolve_aoci(72, false, 72), 72);
}

TEST(Battery, Examples) {
  EXPECT_EQ(battery_transition(3, true, 20), 4);
  EXPECT_EQ(battery_transition(20, true, 20), 20);
  EXPECT_EQ(battery_transition(0, false, 20), 0);
}

TEST(Transition, HandSimulatedSlot) {
  const auto c = one_set();
  EnvState s{{0, 0, 0, 0}, {0, 0, 0, 0}, {3, 0, 5, 2}, 4};
  // Sensors 2 and 4 in one-based numbering.
  const auto [next, out] = transition(s, schedule({1, 3}, 4), {0, 1, 0, 1}, {1, 1, 0, 0}, c);
  EXPECT_EQ(out.activated, (Indicators{0, 0, 0, 1}));
  EXPECT_EQ(out.delivered, (Indicators{0, 0, 0, 1}));
  EXPECT_TRUE(out.integrated);
  EXPECT_EQ(next.aoci, 1);
  EXPECT_EQ(out.reward, -1);
  EXPECT_EQ(next.battery, (std::vector<int>{4, 1, 5, 1}));
  EXPECT_EQ(next.since_delivery, (std::vector<int>{1, 1, 1, 0}));
  EXPECT_EQ(next.scheduled_count, (std::vector<int>{0, 1, 0, 0}));
  const std::vector<std::optional<int>> readings{std::nullopt, std::nullopt, std::nullopt, 1};
  EXPECT_EQ(out.next_obs.battery, readings);
}

TEST(Transition, IdleSlot) {
  const auto c = one_set();
  EnvState s{{2, 1, 0, 3}, {1, 1, 0, 0}, {3, 0, 20, 2}, 7};
  const auto [next, out] = transition(s, silent_action(4), {1, 1, 1, 1}, {1, 0, 1, 0}, c);
  EXPECT_EQ(out.activated, Indicators(4, 0));
  EXPECT_FALSE(out.integrated);
  EXPECT_EQ(next.aoci, 8);
  EXPECT_EQ(out.reward, -8);
  EXPECT_EQ(next.battery, (std::vector<int>{4, 0, 20, 2}));
  for (const auto& b : out.next_obs.battery) EXPECT_FALSE(b.has_value());
}

TEST(Transition, ThresholdEquality) {
  const auto c = one_set();
  EnvState s{{0, 0, 0, 0}, {0, 0, 0, 0}, {5, 5, 5, 5}, 3};
  const auto [next, out] = transition(s, schedule({0, 1}, 4), {1, 1, 0, 0}, {0, 0, 0, 0}, c);
  EXPECT_TRUE(out.integrated);
  EXPECT_EQ(next.aoci, 1);
}

TEST(Transition, RejectsInvalidAction) {
  const auto c = one_set();
  const auto s = reset(c).first;
  EXPECT_THROW(transition(s, schedule({0, 1, 2}, 4), Indicators(4, 1), Indicators(4, 0), c), InvalidAction);
  EXPECT_THROW(transition(s, schedule({0}, 4), Indicators(4, 1), Indicators(4, 0), c), InvalidAction);
}

TEST(Step, SameSeedSameTrajectory) {
  const auto c = default_network(3);
  const auto spaces = build_action_spaces(c);
  Environment a(c, 42), b(c, 42);
  a.reset();
  b.reset();
  Rng pick(7);
  for (int t = 0; t < 500; ++t) {
    ProtoAction p;
    for (const auto& sub : spaces.subspaces) p.indices.push_back(uniform_index(pick, sub.size()));
    const auto action = map_to_valid(p, spaces);
    ASSERT_EQ(a.step(action), b.step(action));
  }
}

TEST(Step, DrawOrderSuccessesThenArrivals) {
  const auto c = default_network(2);
  const auto n = static_cast<std::size_t>(c.num_sensors());
  const auto action = map_to_valid(ProtoAction{{3, 5}}, build_action_spaces(c));
  Environment env(c, 99);
  env.reset();
  Rng mirror(99);
  EnvState state = reset(c).first;
  for (int t = 0; t < 200; ++t) {
    Indicators success(n), arrivals(n);
    for (std::size_t s = 0; s < n; ++s) success[s] = bernoulli(mirror, 1.0 - c.failure_prob[s]);
    for (std::size_t s = 0; s < n; ++s) arrivals[s] = bernoulli(mirror, c.eh_prob[s]);
    auto [next, expected] = transition(state, action, success, arrivals, c);
    ASSERT_EQ(env.step(action), expected);
    state = next;
  }
}

TEST(Step, PerfectChannelIntegratesEverySlot) {
  auto c = one_set();
  c.failure_prob.assign(4, 0.0);
  c.eh_prob.assign(4, 1.0);
  Environment env(c, 3);
  env.reset();
  const auto action = schedule({2, 3}, 4);
  double total = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto out = env.step(action);
    EXPECT_TRUE(out.integrated);
    EXPECT_EQ(out.reward, -1);
    total += out.reward;
  }
  EXPECT_EQ(total / 1000.0, -1.0);
}

TEST(Step, NoHarvestingBoundsDeliveries) {
  auto c = one_set();
  c.eh_prob.assign(4, 0.0);
  Environment env(c, 5);
  env.reset();
  std::vector<int> delivered(4, 0);
  const auto action = schedule({0, 3}, 4);
  for (int t = 0; t < 200; ++t) {
    const auto out = env.step(action);
    for (std::size_t s = 0; s < 4; ++s) delivered[s] += out.delivered[s];
  }
  for (std::size_t s = 0; s < 4; ++s) EXPECT_LE(delivered[s], c.battery_cap[s]);
  EXPECT_EQ(env.state().battery[0], 0);
}

TEST(Properties, RandomizedHistoryReference) {
  const auto report = ref::run_env_properties(2024, 20000);
  EXPECT_EQ(report.steps, 20000);
  EXPECT_EQ(report.total(), 0);
  for (const auto& f : report.first_failures) ADD_FAILURE() << f;
}

TEST(Properties, FirstSlotRewardIsMinusOne) {
  const auto c = default_network(3);
  Environment env(c, 11);
  env.reset();
  EXPECT_EQ(env.step(silent_action(c.num_sensors())).reward, -1);
}
