#include <gtest/gtest.h>

#include "monge/error.hpp"
#include "monge/oracle.hpp"
#include "monge/pipeline.hpp"
#include "test_support.hpp"

namespace monge {
namespace {

TinyInstance matrix_instance(std::vector<std::vector<double>> c) {
  TinyInstance t;
  t.n = static_cast<int>(c.size());
  t.cost = std::move(c);
  return t;
}

TinyInstance path_instance() {
  auto t = matrix_instance({{2, 3}, {1, 2}});
  const auto m = testing::path_graph(4);
  t.backing = GraphBacking{std::make_shared<const DiscreteManifold>(m), testing::unit_costs(m),
                           {0, 1}, {2, 3}};
  return t;
}

TEST(Brute, SingleNode) {
  const auto r = brute_lexicographic(matrix_instance({{0.7}}));
  EXPECT_EQ(r.permutation, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(r.primary, 0.7);
  EXPECT_DOUBLE_EQ(r.secondary, 0.49);
}

TEST(Brute, TwoByTwo) {
  const auto r = brute_lexicographic(matrix_instance({{0, 1}, {1, 0}}));
  EXPECT_EQ(r.permutation, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.primary, 0.0);
  EXPECT_EQ(r.secondary, 0.0);
  EXPECT_TRUE(r.unique);
}

TEST(Brute, PathInstance) {
  const auto r = brute_lexicographic(path_instance());
  EXPECT_EQ(r.permutation, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.primary, 4.0);
  EXPECT_DOUBLE_EQ(r.secondary, 8.0);
  EXPECT_DOUBLE_EQ(r.runner_up_gap, 2.0);
}

TEST(Brute, SizeLimit) {
  try {
    brute_lexicographic(matrix_instance(std::vector<std::vector<double>>(9, std::vector<double>(9, 1.0))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSize);
  }
}

TEST(RandomInstance, Deterministic) {
  for (auto mode : {OracleMode::kSyntheticMetric, OracleMode::kSlicedFromCostField}) {
    const auto a = random_instance(42, 5, mode);
    const auto b = random_instance(42, 5, mode);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.backing->sources, b.backing->sources);
    EXPECT_NE(a.cost, random_instance(43, 5, mode).cost);
  }
}

TEST(RandomInstance, SyntheticIsShortestPathMetric) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = random_instance(seed, 6, OracleMode::kSyntheticMetric);
    const auto& g = *t.backing;
    const auto table = all_pair_costs(*g.manifold, g.edge_costs);
    const std::size_t n = g.manifold->node_count();
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t z = 0; z < n; ++z) {
          EXPECT_LE(table.at(x, z) - table.at(x, y) - table.at(y, z), 1e-12);
        }
      }
    }
    for (int i = 0; i < t.n; ++i) {
      for (int j = 0; j < t.n; ++j) EXPECT_NEAR(t.cost[i][j], table.at(g.sources[i], g.targets[j]), 1e-12);
    }
  }
}

TEST(RandomInstance, SlicedMatchesCostRows) {
  const auto t = random_instance(9, 7, OracleMode::kSlicedFromCostField);
  const auto& g = *t.backing;
  for (int i = 0; i < t.n; ++i) {
    const auto row = mane_row(*g.manifold, g.edge_costs, g.sources[i]);
    for (int j = 0; j < t.n; ++j) {
      EXPECT_EQ(t.cost[i][j], row.values[static_cast<std::size_t>(g.targets[j])]);
    }
  }
}

TEST(Compare, PipelineOnPathInstancePasses) {
  const auto t = path_instance();
  const auto v = compare(t, brute_lexicographic(t), solve_tiny_instance(t));
  EXPECT_TRUE(v.pass) << v.message;
  EXPECT_TRUE(v.support_compared);
  EXPECT_TRUE(v.support_match);
}

TEST(Compare, SecondarySuboptimalPlanFails) {
  const auto t = path_instance();
  const TinySolution swapped{2.0, 5.0, {{0, 1}, {1, 0}}};
  const auto v = compare(t, brute_lexicographic(t), swapped);
  EXPECT_FALSE(v.pass);
  EXPECT_NEAR(v.secondary_error, 2.0, 1e-12);
  EXPECT_NEAR(v.primary_error, 0.0, 1e-12);
}

TEST(Compare, TiesSkipSupport) {
  const auto t = matrix_instance({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const auto oracle = brute_lexicographic(t);
  EXPECT_FALSE(oracle.unique);
  const TinySolution any{1.0, 1.0, {{0, 2}, {1, 0}, {2, 1}}};
  const auto v = compare(t, oracle, any);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(v.support_compared);
}

TEST(Compare, RandomInstancesAgree) {
  for (int i = 0; i < 12; ++i) {
    const auto mode = i % 2 ? OracleMode::kSlicedFromCostField : OracleMode::kSyntheticMetric;
    const auto t = random_instance(700 + i, 2 + i % 6, mode);
    const auto v = compare(t, brute_lexicographic(t), solve_tiny_instance(t));
    EXPECT_TRUE(v.pass) << to_string(mode) << " " << i << ": " << v.message;
  }
}

TEST(OracleMode, RoundTrip) {
  for (auto mode : {OracleMode::kSyntheticMetric, OracleMode::kSlicedFromCostField}) {
    EXPECT_EQ(parse_oracle_mode(to_string(mode)), mode);
  }
  EXPECT_THROW(parse_oracle_mode("bogus"), Error);
}

}  // namespace
}  // namespace monge
