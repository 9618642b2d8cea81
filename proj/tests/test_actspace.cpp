#include <gtest/gtest.h>

#include <set>

#include "aoci/actspace.hpp"
#include "aoci/agent/action_codec.hpp"
#include "references.hpp"

using namespace aoci;

namespace {

const std::vector<double> kD{0.4, 0.6, 0.8, 1.0};

Indicators local(std::initializer_list<int> one_based) {
  Indicators ind(4, 0);
  for (int i : one_based) ind[static_cast<std::size_t>(i - 1)] = 1;
  return ind;
}

}  // namespace

TEST(Subspace, DefaultSetTable) {
  const std::vector<int> sensors{0, 1, 2, 3};
  const auto sub = enumerate_subspace(0, sensors, kD, 2, 1.0);
  ASSERT_EQ(sub.size(), 8u);
  const std::vector<Indicators> expected{Indicators(4, 0), local({4}),    local({1, 2}), local({1, 3}),
                                         local({1, 4}),    local({2, 3}), local({2, 4}), local({3, 4})};
  EXPECT_EQ(sub.elements, expected);
}

TEST(Subspace, MatchesBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 6));
    std::vector<double> d;
    std::vector<int> sensors;
    for (int i = 0; i < n; ++i) {
      d.push_back(0.1 * static_cast<double>(1 + uniform_index(rng, 10)));
      sensors.push_back(10 + i);
    }
    const int m = 1 + static_cast<int>(uniform_index(rng, 3));
    const double threshold = 0.1 * static_cast<double>(1 + uniform_index(rng, 15));
    const auto expected = ref::brute_force_subsets(d, m, threshold);
    if (expected.size() == 1) {
      EXPECT_THROW(enumerate_subspace(0, sensors, d, m, threshold), NoQualifiedSubset);
      continue;
    }
    EXPECT_EQ(enumerate_subspace(0, sensors, d, m, threshold).elements, expected);
  }
}

TEST(Subspace, SingleSensor) {
  const std::vector<int> sensors{0};
  const std::vector<double> d{1.0};
  const auto sub = enumerate_subspace(0, sensors, d, 1, 1.0);
  EXPECT_EQ(sub.size(), 2u);
}

TEST(Subspace, Unachievable) {
  const std::vector<int> sensors{0, 1};
  const std::vector<double> d{0.4, 0.4};
  EXPECT_THROW(enumerate_subspace(0, sensors, d, 1, 1.0), NoQualifiedSubset);
}

TEST(Spaces, PaperCounts) {
  EXPECT_EQ(build_action_spaces(default_network(3)).total_valid, 344u);
  EXPECT_EQ(build_action_spaces(default_network(5)).total_valid, 16808u);
  EXPECT_EQ(build_action_spaces(default_network(7)).total_valid, 823544u);
}

TEST(Spaces, MixedSizes) {
  NetworkConfig c;
  c.sensor_sets = {{0, 1, 2, 3}, {4, 5}};
  c.failure_prob = {0.05, 0.1, 0.15, 0.2, 0.1, 0.1};
  c.eh_prob.assign(6, 0.2);
  c.battery_cap.assign(6, 20);
  c.importance = {0.4, 0.6, 0.8, 1.0, 1.0, 1.0};
  c.threshold = {1.0, 1.0};
  apply_default_caps(c);
  const auto spaces = build_action_spaces(c);
  // 7 * 3 nonzero combinations plus silence.
  EXPECT_EQ(spaces.total_valid, 22u);
  std::set<ValidAction> distinct;
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 4; ++b) distinct.insert(map_to_valid(ProtoAction{{a, b}}, spaces));
  }
  EXPECT_EQ(distinct.size(), 22u);
}

TEST(Discretize, FloorAndClamp) {
  const auto spaces = build_action_spaces(default_network(3));
  EXPECT_EQ(discretize(PrimitiveAction{{0.4, 3.7, 7.2}}, spaces), (ProtoAction{{0, 3, 7}}));
  EXPECT_EQ(discretize(PrimitiveAction{{7.999999, 8.0, 4.0}}, spaces), (ProtoAction{{7, 7, 4}}));
}

TEST(MapToValid, ZeroCollapse) {
  const auto spaces = build_action_spaces(default_network(3));
  EXPECT_TRUE(map_to_valid(ProtoAction{{0, 3, 5}}, spaces).is_silent());
}

TEST(MapToValid, TableLookup) {
  const auto spaces = build_action_spaces(default_network(3));
  const auto a = map_to_valid(ProtoAction{{2, 1, 7}}, spaces);
  Indicators expected(12, 0);
  expected[0] = expected[1] = 1;    // {1,2} of set 1
  expected[7] = 1;                  // {4} of set 2
  expected[10] = expected[11] = 1;  // {3,4} of set 3
  EXPECT_EQ(a.schedule, expected);
}

TEST(MapToValid, SurjectiveOntoBruteForceValidSet) {
  const auto c = default_network(3);
  const auto spaces = build_action_spaces(c);
  std::set<ValidAction> image;
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      for (std::size_t d = 0; d < 8; ++d) {
        const auto v = map_to_valid(ProtoAction{{a, b, d}}, spaces);
        EXPECT_TRUE(validate_action(v, c));
        image.insert(v);
      }
    }
  }
  EXPECT_EQ(image.size(), 344u);
  // Every valid indicator vector, by exhaustive search over 2^12.
  std::set<ValidAction> valid;
  for (unsigned mask = 0; mask < (1u << 12); ++mask) {
    ValidAction v{Indicators(12, 0)};
    for (unsigned s = 0; s < 12; ++s) v.schedule[s] = (mask >> s) & 1u;
    if (validate_action(v, c)) valid.insert(v);
  }
  EXPECT_EQ(image, valid);
}

TEST(Validate, Examples) {
  const auto c = default_network(3);
  EXPECT_TRUE(validate_action(silent_action(12), c));
  Indicators three(12, 0);
  three[1] = three[2] = three[3] = 1;
  three[7] = 1;
  three[11] = 1;
  EXPECT_FALSE(validate_action(ValidAction{three}, c));
  Indicators weak(12, 0);
  weak[0] = 1;  // D = 0.4 alone
  weak[7] = 1;
  weak[11] = 1;
  EXPECT_FALSE(validate_action(ValidAction{weak}, c));
}

TEST(Canonical, RoundTripAndOrder) {
  const auto spaces = build_action_spaces(default_network(3));
  EXPECT_EQ(canonical_index(ProtoAction{{0, 5, 2}}, spaces), 0u);
  EXPECT_EQ(canonical_index(ProtoAction{{1, 1, 1}}, spaces), 1u);
  EXPECT_EQ(canonical_index(ProtoAction{{2, 1, 1}}, spaces), 2u);
  EXPECT_EQ(canonical_index(ProtoAction{{1, 2, 1}}, spaces), 8u);
  EXPECT_EQ(canonical_index(ProtoAction{{7, 7, 7}}, spaces), 343u);
  std::set<ValidAction> seen;
  for (std::uint64_t i = 0; i < spaces.total_valid; ++i) {
    const auto p = proto_from_canonical(i, spaces);
    EXPECT_EQ(canonical_index(p, spaces), i);
    seen.insert(map_to_valid(p, spaces));
  }
  EXPECT_EQ(seen.size(), 344u);
}

TEST(Codec, FlatReadsCanonicalIndex) {
  const auto spaces = build_action_spaces(default_network(3));
  agent::FlatCodec flat(spaces);
  ASSERT_EQ(flat.dims(), 1);
  EXPECT_EQ(flat.sizes()[0], 344.0);
  EXPECT_TRUE(flat.decode(PrimitiveAction{{0.7}}).is_silent());
  EXPECT_EQ(flat.decode(PrimitiveAction{{8.5}}), map_to_valid(proto_from_canonical(8, spaces), spaces));
  EXPECT_EQ(flat.decode(PrimitiveAction{{344.0}}), map_to_valid(proto_from_canonical(343, spaces), spaces));
}

TEST(Codec, DecomposedMatchesMapping) {
  const auto spaces = build_action_spaces(default_network(3));
  agent::DecomposedCodec adm(spaces);
  EXPECT_EQ(adm.dims(), 3);
  EXPECT_EQ(adm.decode(PrimitiveAction{{2.5, 1.1, 7.9}}), map_to_valid(ProtoAction{{2, 1, 7}}, spaces));
}
