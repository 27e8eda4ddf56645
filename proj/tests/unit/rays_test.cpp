#include <gtest/gtest.h>

#include "monge/error.hpp"
#include "monge/rays.hpp"
#include "test_support.hpp"

namespace monge {
namespace {

// a=0, b=1, b'=2, d=3: a→b→d with times (1,2), a→b'→d with times (2,1), plus
// expensive reverse edges for strong connectivity.
struct Diamond {
  DiscreteManifold manifold;
  std::vector<EdgeCost> costs;
};

Diamond diamond() {
  GraphSpec spec;
  spec.positions = {Vec2(0, 0), Vec2(1, 1), Vec2(1, -1), Vec2(2, 0)};
  const std::vector<std::tuple<int, int, double>> edges = {
      {0, 1, 1.0}, {1, 3, 2.0}, {0, 2, 2.0}, {2, 3, 1.0},
      {1, 0, 10.0}, {3, 1, 10.0}, {2, 0, 10.0}, {3, 2, 10.0}};
  std::vector<double> w;
  for (auto [s, t, c] : edges) {
    spec.edges.push_back({s, t, spec.positions[t] - spec.positions[s]});
    w.push_back(c);
  }
  return {load_graph(spec), explicit_edge_costs(w)};
}

TEST(CalibratedEdges, PathForwardOnly) {
  const auto m = testing::path_graph(4);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 1, 2, 3}, 0}, 1e-9);
  ASSERT_EQ(g.edges.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(g.to[k], g.from[k] + 1);
  EXPECT_EQ(g.topological_order, (std::vector<NodeId>{0, 1, 2, 3}));
}

TEST(CalibratedEdges, ConstantPotentialHasNone) {
  const auto m = testing::path_graph(4);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 0, 0, 0}, 0}, 1e-9);
  EXPECT_TRUE(g.edges.empty());
  EXPECT_TRUE(classify(alpha_beta(g), 0.0).transport.empty());
}

TEST(CalibratedEdges, CycleIsToleranceError) {
  const auto m = testing::directed_cycle(3);
  try {
    calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 0, 0}, 0}, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTolerance);
  }
}

TEST(AlphaBeta, Chain) {
  const auto m = testing::path_graph(3);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 1, 2}, 0}, 1e-9);
  const auto ab = alpha_beta(g);
  EXPECT_EQ(ab.alpha, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(ab.beta, (std::vector<double>{2, 1, 0}));

  const auto c = classify(ab, 0.0);
  EXPECT_EQ(c.transport, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(c.interior, (std::vector<NodeId>{1}));
  EXPECT_EQ(c.ends, (std::vector<NodeId>{0, 2}));
  EXPECT_TRUE(classify(ab, 5.0).interior.empty());
}

TEST(AlphaBeta, IsolatedNode) {
  const auto m = testing::path_graph(4);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 1, 2, 2}, 0}, 1e-9);
  const auto ab = alpha_beta(g);
  EXPECT_EQ(ab.alpha[3], 0.0);
  EXPECT_EQ(ab.beta[3], 0.0);
  const auto c = classify(ab, 0.0);
  EXPECT_EQ(std::count(c.transport.begin(), c.transport.end(), 3), 0);
}

TEST(AlphaBeta, DiamondLongestPaths) {
  const auto d = diamond();
  const auto g = calibrated_edges(d.manifold, d.costs, DualPotential{{0, 1, 2, 3}, 0}, 1e-9);
  EXPECT_EQ(g.edges.size(), 4u);
  const auto ab = alpha_beta(g);
  EXPECT_EQ(ab.alpha[3], 3.0);
  EXPECT_EQ(ab.beta[0], 3.0);
  // Dynamic-programming consistency along each calibrated edge.
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    EXPECT_LE(ab.alpha[g.from[k]] + g.time[k], ab.alpha[g.to[k]] + 1e-12);
    EXPECT_LE(ab.beta[g.to[k]] + g.time[k], ab.beta[g.from[k]] + 1e-12);
  }
}

TEST(MaximalChains, SingleAndDiamond) {
  const auto m = testing::path_graph(4);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 1, 2, 3}, 0}, 1e-9);
  const auto chains = maximal_chains(g, alpha_beta(g));
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0], (std::vector<NodeId>{0, 1, 2, 3}));

  const auto d = diamond();
  const auto dg = calibrated_edges(d.manifold, d.costs, DualPotential{{0, 1, 2, 3}, 0}, 1e-9);
  auto two = maximal_chains(dg, alpha_beta(dg));
  std::sort(two.begin(), two.end());
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], (std::vector<NodeId>{0, 1, 3}));
  EXPECT_EQ(two[1], (std::vector<NodeId>{0, 2, 3}));
  EXPECT_TRUE(calibrated_path_exists(dg, 0, 3));
  EXPECT_FALSE(calibrated_path_exists(dg, 1, 2));
}

TEST(RayAudits, OrderOnPath) {
  const auto m = testing::path_graph(4);
  const auto g = calibrated_edges(m, testing::unit_costs(m), DualPotential{{0, 1, 2, 3}, 0}, 1e-9);
  const auto chains = maximal_chains(g, alpha_beta(g));
  const TransportPlan ordered{{{0, 2, 0.5}, {1, 3, 0.5}}, 2.0};
  const TransportPlan swapped{{{0, 3, 0.5}, {1, 2, 0.5}}, 2.0};

  const auto a = ray_audits(g, chains, ordered, {}, 0.5);
  EXPECT_EQ(a.order_pairs, 1u);
  EXPECT_EQ(a.order_violations, 0u);
  EXPECT_EQ(a.speed_violations, 0u);
  EXPECT_DOUBLE_EQ(a.min_speed_ratio, 1.0);
  EXPECT_EQ(a.unjoined_support_pairs, 0u);
  EXPECT_EQ(ray_audits(g, chains, swapped, {}, 0.5).order_violations, 1u);

  const std::vector<NodeId> lambda = {1};
  const auto l = ray_audits(g, chains, ordered, lambda, 0.5);
  EXPECT_EQ(l.chains_with_lambda, 1u);
  EXPECT_EQ(l.max_lambda_per_chain, 1u);
  EXPECT_EQ(ray_audits(g, chains, ordered, {}, 1.5).speed_violations, 3u);
}

}  // namespace
}  // namespace monge
