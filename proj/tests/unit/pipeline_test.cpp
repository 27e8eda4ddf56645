#include <gtest/gtest.h>

#include <algorithm>

#include "monge/config.hpp"
#include "monge/io.hpp"
#include "monge/pipeline.hpp"
#include "monge/verification.hpp"

namespace monge {
namespace {

struct Instance {
  DiscreteManifold manifold;
  std::vector<EdgeCost> costs;
  double delta;
  Marginals marginals;
};

Instance randers16() {
  RunConfig c;
  c.manifold_n = 16;
  c.metric_g = "aniso 0.5";
  const auto m = build_manifold(c);
  const auto model = build_cost_model(c, m);
  return {m, compute_edge_costs(m, model), model.delta(), build_marginals(c, m)};
}

TEST(Pipeline, InvariantsOnRandersTorus) {
  const auto in = randers16();
  const auto r = run_pipeline(in.manifold, in.costs, in.delta, in.marginals);
  EXPECT_LE(r.certificate.max_feasibility_violation, 1e-9);
  EXPECT_LE(r.certificate.max_slackness_residual, 1e-9);
  EXPECT_LE(std::abs(r.certificate.duality_gap), 1e-9);
  EXPECT_LE(r.selection_primary_gap, 1e-9);
  EXPECT_EQ(r.monotonicity.negative, 0u);

  // The stage-1 plan is feasible for stage 2, so stage 2 cannot do worse on σ.
  double primary_sigma = 0.0;
  for (const auto& e : r.primary.plan.entries) {
    const auto it = std::find_if(r.tight.begin(), r.tight.end(), [&](const TightPair& p) {
      return p.source == e.source && p.target == e.target;
    });
    ASSERT_NE(it, r.tight.end());
    primary_sigma += it->cost * it->cost * e.mass;
  }
  EXPECT_LE(r.selection.secondary_cost, primary_sigma + 1e-12);

  ASSERT_TRUE(r.rays);
  EXPECT_EQ(r.rays->audit.speed_violations, 0u);
  EXPECT_EQ(r.rays->audit.order_violations, 0u);
  EXPECT_EQ(r.rays->audit.unjoined_support_pairs, 0u);
  EXPECT_GE(r.rays->audit.min_speed_ratio, r.delta - 1e-9);
  for (const auto& chain : r.rays->chains) {
    for (std::size_t k = 1; k < chain.size(); ++k) {
      EXPECT_GT(r.primary.potential.u[chain[k]], r.primary.potential.u[chain[k - 1]]);
    }
  }
}

TEST(Pipeline, BatchedTightScanMatchesSingleBatch) {
  const auto in = randers16();
  const auto primary = solve_primary(in.manifold, in.costs, in.marginals);
  const double tol = default_tight_tolerance(in.costs);
  const auto whole = tight_set_batched(in.manifold, in.costs, in.marginals, primary, tol, 1);
  const auto small = tight_set_batched(in.manifold, in.costs, in.marginals, primary, tol, 1, 256 * 7);
  EXPECT_EQ(whole.tight, small.tight);
  EXPECT_EQ(whole.certificate.pairs_checked, small.certificate.pairs_checked);
  EXPECT_EQ(whole.certificate.max_feasibility_violation, small.certificate.max_feasibility_violation);
}

TEST(Pipeline, Deterministic) {
  const auto in = randers16();
  const auto a = to_json(run_pipeline(in.manifold, in.costs, in.delta, in.marginals)).dump();
  PipelineOptions threaded;
  threaded.threads = 3;
  const auto b = to_json(run_pipeline(in.manifold, in.costs, in.delta, in.marginals, threaded)).dump();
  EXPECT_EQ(a, b);
}

TEST(Acceptance, ReportIsReproducible) {
  const auto a = run_acceptance_suite();
  const auto b = run_acceptance_suite();
  ASSERT_EQ(a.checks.size(), 10u);
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
}

}  // namespace
}  // namespace monge
