#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "monge/error.hpp"
#include "monge/geometry.hpp"
#include "test_support.hpp"

namespace monge {
namespace {

// Plain BFS from every node; independent of is_strongly_connected.
bool all_pairs_reachable(const DiscreteManifold& m) {
  const std::size_t n = m.node_count();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    std::size_t count = 1;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (const Edge& e : m.edges()) {
        if (static_cast<std::size_t>(e.source) == v && !seen[static_cast<std::size_t>(e.target)]) {
          seen[static_cast<std::size_t>(e.target)] = true;
          ++count;
          q.push(static_cast<std::size_t>(e.target));
        }
      }
    }
    if (count != n) return false;
  }
  return true;
}

TEST(TorusGrid, SideTwoEightStencil) {
  const auto m = build_torus_grid(2, Stencil::k8);
  EXPECT_EQ(m.node_count(), 4u);
  for (NodeId x = 0; x < 4; ++x) EXPECT_EQ(m.out_edges(x).size(), 8u);
}

TEST(TorusGrid, SpacingQuarter) {
  const auto m = build_torus_grid(4);
  EXPECT_DOUBLE_EQ(m.spacing(), 0.25);
  for (const Edge& e : m.edges()) {
    if (e.displacement.y() == 0.0 && std::abs(e.displacement.x()) > 0.0 &&
        std::abs(e.displacement.x()) < 0.3) {
      EXPECT_DOUBLE_EQ(e.length, 0.25);
    }
  }
}

TEST(TorusGrid, Side32Stencil16) {
  const auto m = build_torus_grid(32, Stencil::k16);
  EXPECT_EQ(m.node_count(), 1024u);
  EXPECT_EQ(m.edge_count(), 16u * 1024u);
  EXPECT_TRUE(is_strongly_connected(m.node_count(), m.edges()));
}

TEST(TorusGrid, SmallGridReachableByIndependentBfs) {
  EXPECT_TRUE(all_pairs_reachable(build_torus_grid(5, Stencil::k16)));
  EXPECT_TRUE(all_pairs_reachable(build_torus_grid(3, Stencil::k8)));
}

TEST(TorusGrid, RejectsSideBelowTwo) {
  try {
    build_torus_grid(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
  }
}

TEST(TorusGrid, StencilIsSymmetricAndShort) {
  for (Stencil s : {Stencil::k8, Stencil::k16}) {
    const auto m = build_torus_grid(7, s);
    std::set<std::tuple<NodeId, NodeId, long, long>> keyed;
    auto key = [](double v) { return std::lround(v * 1e9); };
    for (const Edge& e : m.edges()) {
      EXPECT_NE(e.source, e.target);
      EXPECT_LE(e.length, stencil_diameter(s) * m.spacing() + 1e-12);
      keyed.insert({e.source, e.target, key(e.displacement.x()), key(e.displacement.y())});
    }
    for (const Edge& e : m.edges()) {
      EXPECT_TRUE(keyed.count({e.target, e.source, key(-e.displacement.x()), key(-e.displacement.y())}));
    }
  }
}

TEST(LoadGraph, DirectedCycleIsValid) {
  const auto m = testing::directed_cycle(4);
  EXPECT_EQ(m.node_count(), 4u);
  EXPECT_EQ(m.edge_count(), 4u);
  EXPECT_EQ(m.topology(), Topology::kGeneralGraph);
}

TEST(LoadGraph, OneWayPathIsDisconnected) {
  GraphSpec spec;
  for (int i = 0; i < 3; ++i) spec.positions.emplace_back(i, 0);
  spec.edges = {{0, 1, Vec2(1, 0)}, {1, 2, Vec2(1, 0)}};
  try {
    load_graph(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConnectivity);
  }
}

TEST(LoadGraph, CompleteDigraphOnThree) {
  GraphSpec spec;
  spec.positions = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) {
      if (s != t) spec.edges.push_back({s, t, spec.positions[t] - spec.positions[s]});
    }
  }
  EXPECT_EQ(load_graph(spec).edge_count(), 6u);
}

TEST(LoadGraph, RejectsDuplicatesAndSelfLoops) {
  GraphSpec spec;
  spec.positions = {Vec2(0, 0), Vec2(1, 0)};
  spec.edges = {{0, 1, Vec2(1, 0)}, {1, 0, Vec2(-1, 0)}, {0, 1, Vec2(1, 0)}};
  EXPECT_THROW(load_graph(spec), Error);
  spec.edges = {{0, 1, Vec2(1, 0)}, {1, 0, Vec2(-1, 0)}, {0, 0, Vec2(1, 0)}};
  EXPECT_THROW(load_graph(spec), Error);
  spec.edges = {{0, 1, Vec2(1, 0)}, {1, 5, Vec2(-1, 0)}};
  EXPECT_THROW(load_graph(spec), Error);
}

TEST(LoadGraph, ParsesNodeEdgeList) {
  std::istringstream in(
      "# triangle\n"
      "node 0 0 0\nnode 1 1 0\nnode 2 0 1\n"
      "edge 0 1\nedge 1 2\nedge 2 0 0 -1\n");
  const auto m = load_graph(parse_graph_spec(in));
  EXPECT_EQ(m.edge_count(), 3u);
  EXPECT_DOUBLE_EQ(m.edge(1).displacement.x(), -1.0);
  EXPECT_DOUBLE_EQ(m.edge(2).displacement.y(), -1.0);
}

TEST(LoadGraph, MissingFileIsIoError) {
  try {
    read_graph_spec_file("/nonexistent/graph.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Metric, EuclideanPythagoras) {
  const auto g = FinslerMetric::euclidean(1);
  EXPECT_DOUBLE_EQ(metric_eval(g, 0, Vec2(3, 4)), 5.0);
}

TEST(Metric, RandersAsymmetry) {
  const auto g = FinslerMetric::randers({Mat2::Identity()}, {Vec2(0.3, 0.0)});
  EXPECT_NEAR(metric_eval(g, 0, Vec2(1, 0)), 1.3, 1e-15);
  EXPECT_NEAR(metric_eval(g, 0, Vec2(-1, 0)), 0.7, 1e-15);
}

TEST(Metric, HomogeneityAndDriftCancellation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 G;
  G << 2.0, 0.3, 0.3, 1.0;
  const auto g = FinslerMetric::randers({G}, {Vec2(0.2, -0.4)});
  for (int i = 0; i < 200; ++i) {
    const Vec2 v(u(rng), u(rng));
    EXPECT_NEAR(metric_eval(g, 0, 2.0 * v), 2.0 * metric_eval(g, 0, v), 1e-12);
    EXPECT_GE(metric_eval(g, 0, v) + metric_eval(g, 0, -v), 2.0 * std::sqrt(v.dot(G * v)) - 1e-12);
  }
}

TEST(Metric, DegenerateDriftThrows) {
  const auto g = FinslerMetric::randers({Mat2::Identity()}, {Vec2(1.1, 0.0)});
  try {
    metric_eval(g, 0, Vec2(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMetricDegenerate);
  }
}

TEST(Metric, RejectsIndefiniteG) {
  Mat2 bad;
  bad << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(FinslerMetric::riemannian({bad}), Error);
}

TEST(MetricAudit, EuclideanIsClean) {
  const auto m = build_torus_grid(4);
  const auto a = metric_audit(FinslerMetric::euclidean(m.node_count()), m, 500);
  EXPECT_LE(a.max_positivity_violation, 1e-12);
  EXPECT_LE(a.max_homogeneity_violation, 1e-12);
  EXPECT_LE(a.max_convexity_violation, 1e-12);
  EXPECT_TRUE(a.positive);
  EXPECT_FALSE(a.near_degenerate);
}

TEST(MetricAudit, NearDegenerateDriftIsFlagged) {
  const auto m = build_torus_grid(3);
  const auto g = FinslerMetric::randers(std::vector<Mat2>(9, Mat2::Identity()),
                                        std::vector<Vec2>(9, Vec2(0.99, 0.0)));
  const auto a = metric_audit(g, m, 500);
  EXPECT_TRUE(a.positive);
  EXPECT_TRUE(a.near_degenerate);
  EXPECT_NEAR(a.min_unit_rate, 0.01, 1e-12);
}

TEST(MetricAudit, SuperunitDriftReportsPositivityViolation) {
  const auto m = build_torus_grid(3);
  const auto g = FinslerMetric::randers(std::vector<Mat2>(9, Mat2::Identity()),
                                        std::vector<Vec2>(9, Vec2(1.1, 0.0)));
  const auto a = metric_audit(g, m, 500);
  EXPECT_FALSE(a.positive);
  EXPECT_NEAR(a.max_positivity_violation, 0.1, 1e-12);
}

}  // namespace
}  // namespace monge
