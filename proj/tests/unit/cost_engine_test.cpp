#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "monge/cost_engine.hpp"
#include "monge/error.hpp"
#include "test_support.hpp"

namespace monge {
namespace {

Lagrangian quadratic_const(std::size_t n, double v, double k) {
  return Lagrangian::quadratic(std::vector<Mat2>(n, Mat2::Identity()), std::vector<double>(n, v), k);
}

EdgeId find_edge(const DiscreteManifold& m, const Vec2& d) {
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    if ((m.edges()[e].displacement - d).norm() < 1e-12) return static_cast<EdgeId>(e);
  }
  ADD_FAILURE() << "no edge with displacement " << d.transpose();
  return 0;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kIo;
}

TEST(EdgeWeightFinsler, Examples) {
  const auto m = build_torus_grid(4);
  const double h = 0.25;
  const auto e = find_edge(m, Vec2(h, 0));
  const auto back = find_edge(m, Vec2(-h, 0));
  EXPECT_DOUBLE_EQ(edge_weight_finsler(m, FinslerMetric::euclidean(16), e).weight, 0.25);

  const auto randers = FinslerMetric::randers(std::vector<Mat2>(16, Mat2::Identity()),
                                              std::vector<Vec2>(16, Vec2(0.3, 0)));
  EXPECT_NEAR(edge_weight_finsler(m, randers, e).weight, 1.3 * h, 1e-15);
  EXPECT_NEAR(edge_weight_finsler(m, randers, back).weight, 0.7 * h, 1e-15);

  Mat2 g = Mat2::Zero();
  g(0, 0) = 4.0;
  g(1, 1) = 1.0;
  const auto riem = FinslerMetric::riemannian(std::vector<Mat2>(16, g));
  EXPECT_NEAR(edge_weight_finsler(m, riem, e).weight, 2.0 * h, 1e-15);
}

TEST(EdgeWeightLagrangian, HalfSquareAtHalf) {
  const auto m = testing::path_graph(2);
  const auto c = edge_weight_lagrangian(m, quadratic_const(2, 0.0, 0.5), 0);
  EXPECT_NEAR(c.time, 1.0, 1e-9);
  EXPECT_NEAR(c.weight, 1.0, 1e-12);
  EXPECT_LE(c.energy_residual, 1e-9);
  EXPECT_FALSE(c.boundary);
}

TEST(EdgeWeightLagrangian, TildeUnitSpeed) {
  const auto m = build_torus_grid(4);
  const auto g = FinslerMetric::euclidean(16);
  const auto e = find_edge(m, Vec2(0.25, 0));
  const auto c = edge_weight_lagrangian(m, Lagrangian::tilde(g), e);
  EXPECT_NEAR(c.time, 0.25, 1e-9);
  EXPECT_NEAR(c.weight, 0.25, 1e-12);
  EXPECT_NEAR(g.eval(0, m.edge(e).displacement / c.time), 1.0, 1e-9);
}

TEST(EdgeWeightLagrangian, ClosedFormAcrossShifts) {
  const auto m = testing::path_graph(2);
  for (double k : {-0.9, -0.5, 0.0, 0.7, 3.0}) {
    const auto c = edge_weight_lagrangian(m, quadratic_const(2, 1.0, k), 0);
    EXPECT_NEAR(c.weight, std::sqrt(2.0 * (1.0 + k)), 1e-10) << k;
  }
}

TEST(EdgeWeightLagrangian, TildeMatchesFinslerPerEdge) {
  const auto m = build_torus_grid(6);
  Mat2 g;
  g << 1.3, 0.2, 0.2, 0.9;
  const auto metric = FinslerMetric::randers(std::vector<Mat2>(36, g),
                                             std::vector<Vec2>(36, Vec2(0.2, 0.35)));
  const auto tilde = Lagrangian::tilde(metric);
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    const auto id = static_cast<EdgeId>(e);
    EXPECT_NEAR(edge_weight_lagrangian(m, tilde, id).weight,
                edge_weight_finsler(m, metric, id).weight, 1e-12);
  }
}

TEST(EdgeWeightLagrangian, CriticalShiftIsBoundary) {
  const auto m = testing::path_graph(2);
  const auto c = edge_weight_lagrangian(m, quadratic_const(2, 1.0, -1.0), 0);
  EXPECT_TRUE(c.boundary);
  EXPECT_LT(c.weight, 1e-2);
  EXPECT_GE(c.weight, 0.0);
}

TEST(EdgeWeightLagrangian, BelowCriticalIsSubcritical) {
  const auto m = testing::path_graph(2);
  EXPECT_EQ(kind_of([&] { edge_weight_lagrangian(m, quadratic_const(2, 1.0, -1.5), 0); }),
            ErrorKind::kSubcritical);
  EXPECT_EQ(kind_of([&] {
              compute_edge_costs(m, CostModel::lagrangian(quadratic_const(2, 1.0, -1.0)));
            }),
            ErrorKind::kSupercriticalityViolated);
}

TEST(EdgeWeightLagrangian, WeightAboveFloorTimesTime) {
  const auto m = build_torus_grid(5);
  const auto l = Lagrangian::quadratic(std::vector<Mat2>(25, Mat2::Identity()),
                                       std::vector<double>(25, 0.3), 0.1);
  const double delta = l.positivity_floor();
  for (const auto& c : compute_edge_costs(m, CostModel::lagrangian(l))) {
    EXPECT_GE(c.weight, delta * c.time - 1e-14);
  }
}

TEST(ManeRow, DirectedCycle) {
  const auto m = testing::directed_cycle(4);
  const auto w = testing::unit_costs(m);
  EXPECT_DOUBLE_EQ(mane_row(m, w, 0).values[2], 2.0);
  EXPECT_DOUBLE_EQ(mane_row(m, w, 2).values[0], 2.0);
  EXPECT_DOUBLE_EQ(mane_row(m, w, 1).values[0], 3.0);
  EXPECT_DOUBLE_EQ(mane_row(m, w, 3).values[3], 0.0);
}

TEST(ManeRow, RejectsNonpositiveWeight) {
  const auto m = testing::directed_cycle(3);
  const auto w = explicit_edge_costs(std::vector<double>{1.0, 0.0, 1.0});
  EXPECT_EQ(kind_of([&] { mane_row(m, w, 0); }), ErrorKind::kSupercriticalityViolated);
}

// Stencil-16 paths realise a polygonal norm whose unit ball is inscribed in
// the Euclidean disc; the widest angular gap is arctan(1/2), which bounds the
// overestimate by 1/cos(arctan(1/2)/2).
TEST(ManeRow, EuclideanTorusAgainstWrappedDistance) {
  const int n = 16;
  const auto m = build_torus_grid(n);
  const auto w = compute_edge_costs(m, CostModel::finsler(FinslerMetric::euclidean(m.node_count())));
  const double bound = 1.0 / std::cos(std::atan(0.5) / 2.0);
  double worst = 0.0;
  double mean = 0.0;
  for (NodeId s : {0, 37, 200}) {
    const auto row = mane_row(m, w, s);
    for (std::size_t y = 0; y < m.node_count(); ++y) {
      if (static_cast<NodeId>(y) == s) continue;
      Vec2 d = m.position(static_cast<NodeId>(y)) - m.position(s);
      for (int i = 0; i < 2; ++i) d[i] -= std::round(d[i]);
      const double ratio = row.values[y] / d.norm();
      EXPECT_GE(ratio, 1.0 - 1e-12);
      worst = std::max(worst, ratio);
      mean += ratio;
    }
  }
  mean /= 3.0 * (m.node_count() - 1);
  EXPECT_LE(worst, bound + 1e-12);
  EXPECT_LE(mean, 1.02);
}

TEST(ManeRow, DynamicProgrammingOptimality) {
  const auto m = build_torus_grid(8);
  const auto metric = FinslerMetric::randers(std::vector<Mat2>(64, Mat2::Identity()),
                                             std::vector<Vec2>(64, Vec2(0.4, 0.1)));
  const auto w = compute_edge_costs(m, CostModel::finsler(metric));
  const auto row = mane_row(m, w, 5);
  for (std::size_t y = 0; y < m.node_count(); ++y) {
    if (y == 5) continue;
    double best = std::numeric_limits<double>::infinity();
    for (EdgeId e : m.in_edges(static_cast<NodeId>(y))) {
      best = std::min(best, row.values[static_cast<std::size_t>(m.edge(e).source)] +
                                w[static_cast<std::size_t>(e)].weight);
    }
    EXPECT_NEAR(row.values[y], best, 1e-15);
  }
}

TEST(CostTable, MetricAxiomsOnRandersTorus) {
  const auto m = build_torus_grid(8);
  const auto metric = FinslerMetric::randers(std::vector<Mat2>(64, Mat2::Identity()),
                                             std::vector<Vec2>(64, Vec2(0.4, 0.1)));
  const auto w = compute_edge_costs(m, CostModel::finsler(metric));
  const auto table = all_pair_costs(m, w);
  const auto cert = certify_metric_axioms(table, 20000, 9);
  EXPECT_EQ(cert.triples, 20000u);
  EXPECT_LE(cert.max_triangle_violation, 1e-9);
  EXPECT_EQ(cert.max_diagonal, 0.0);
  EXPECT_GT(cert.min_pair_sum, 0.0);
}

TEST(CostTable, RowsMatchSingleSource) {
  const auto m = build_torus_grid(6);
  const auto w = compute_edge_costs(m, CostModel::finsler(FinslerMetric::euclidean(36)));
  const std::vector<NodeId> sources = {3, 17, 30};
  const auto table = cost_rows(m, w, sources, 2);
  EXPECT_TRUE(table.has_row(17));
  EXPECT_FALSE(table.has_row(0));
  for (NodeId s : sources) {
    const auto row = mane_row(m, w, s);
    for (std::size_t y = 0; y < 36; ++y) EXPECT_EQ(table.at(s, static_cast<NodeId>(y)), row.values[y]);
  }
}

TEST(CostTable, DenseLimit) {
  const auto m = build_torus_grid(46);
  ASSERT_GT(m.node_count(), kMaxDenseNodes);
  const auto w = explicit_edge_costs(std::vector<double>(m.edge_count(), 1.0));
  EXPECT_EQ(kind_of([&] { all_pair_costs(m, w); }), ErrorKind::kSize);
}

TEST(NonpositiveCycle, Detection) {
  const std::vector<WeightedArc> negative = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, -3.0}, {2, 3, 1.0}};
  const auto cycle = find_nonpositive_cycle(4, negative);
  ASSERT_TRUE(cycle);
  double total = 0.0;
  for (auto a : *cycle) total += negative[a].weight;
  EXPECT_LE(total, 0.0);

  const std::vector<WeightedArc> zero = {{0, 1, 1.0}, {1, 0, -1.0}, {1, 2, 0.5}};
  EXPECT_TRUE(find_nonpositive_cycle(3, zero));

  const std::vector<WeightedArc> positive = {{0, 1, 1.0}, {1, 0, -0.5}, {1, 2, -4.0}};
  EXPECT_FALSE(find_nonpositive_cycle(3, positive));
}

TEST(CriticalValue, ConstantPotentialOne) {
  const auto m = build_torus_grid(8);
  const auto cv = critical_value(m, quadratic_const(64, 1.0, 0.0), -2.0, 0.0, 1e-6);
  EXPECT_LE(cv.k_hi - cv.k_lo, 1e-6);
  EXPECT_LE(cv.k_lo, -1.0 + 1e-9);
  EXPECT_GE(cv.k_hi, -1.0 - 1e-9);
  EXPECT_TRUE(verify_lower_certificate(m, quadratic_const(64, 1.0, 0.0), cv.lower));
  EXPECT_TRUE(verify_upper_certificate(m, quadratic_const(64, 1.0, 0.0), cv.upper));
}

TEST(CriticalValue, FreeParticle) {
  const auto m = build_torus_grid(6);
  const auto family = quadratic_const(36, 0.0, 0.0);
  const auto cv = critical_value(m, family, -1.0, 1.0, 1e-6);
  EXPECT_NEAR(cv.estimate, 0.0, 1e-6);
  EXPECT_TRUE(verify_lower_certificate(m, family, cv.lower));
  EXPECT_TRUE(verify_upper_certificate(m, family, cv.upper));

  const auto above = compute_edge_costs(m, CostModel::lagrangian(family.with_shift(cv.k_hi + 0.1)));
  for (const auto& c : above) EXPECT_GT(c.weight, 0.0);
  for (double v : mane_row(m, above, 0).values) EXPECT_TRUE(std::isfinite(v));
}

TEST(CriticalValue, BracketMustStraddle) {
  const auto m = build_torus_grid(4);
  const auto family = quadratic_const(16, 1.0, 0.0);
  EXPECT_EQ(kind_of([&] { critical_value(m, family, 0.0, 1.0, 1e-6); }), ErrorKind::kBracket);
  EXPECT_EQ(kind_of([&] { critical_value(m, family, -3.0, -2.0, 1e-6); }), ErrorKind::kBracket);
}

TEST(CriticalValue, TamperedCertificatesRejected) {
  const auto m = build_torus_grid(6);
  const auto family = quadratic_const(36, 1.0, 0.0);
  const auto cv = critical_value(m, family, -2.0, 0.0, 1e-4);

  auto lower = cv.lower;
  lower.shift = 0.5;
  lower.subcritical_edge.reset();
  EXPECT_FALSE(verify_lower_certificate(m, family, lower));
  if (!cv.lower.cycle.empty()) {
    auto broken = cv.lower;
    broken.cycle.pop_back();
    broken.times.pop_back();
    broken.subcritical_edge.reset();
    EXPECT_FALSE(verify_lower_certificate(m, family, broken));
  }

  auto upper = cv.upper;
  upper.shift = -1.5;
  EXPECT_FALSE(verify_upper_certificate(m, family, upper));
  upper = cv.upper;
  upper.min_edge_weight *= 2.0;
  EXPECT_FALSE(verify_upper_certificate(m, family, upper));
}

}  // namespace
}  // namespace monge
