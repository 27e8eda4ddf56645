#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "monge/cost_engine.hpp"
#include "monge/oracle.hpp"
#include "monge/ot_solver.hpp"
#include "monge/rays.hpp"
#include "monge/selector.hpp"

namespace monge {

struct PipelineOptions {
  double tol_tight = 0.0;  // 0: default_tight_tolerance
  double tol_cal = 0.0;    // 0: 2 · tol_tight
  double epsilon = 0.0;
  int threads = 1;
  std::size_t quadruple_samples = 10000;
  std::uint64_t seed = 1;
  bool rays = true;
};

struct RayOutputs {
  CalibratedGraph graph;
  AlphaBeta times;
  RayClasses classes;
  std::vector<std::vector<NodeId>> chains;
  RayAudit audit;
};

struct PipelineResult {
  double delta = 0.0;
  double tol_tight = 0.0;
  double tol_cal = 0.0;
  PrimarySolution primary;
  // Feasibility over every (x ∈ supp μ₀, y) pair, slackness on the stage-1 plan.
  OptimalityCertificate certificate;
  std::vector<TightPair> tight;
  SelectionResult selection;
  double selection_primary_gap = 0.0;  // |⟨c, selected⟩ − K|
  MonotonicityReport monotonicity;
  std::optional<RayOutputs> rays;
};

struct TightScan {
  std::vector<TightPair> tight;
  OptimalityCertificate certificate;
};

// Cost rows for supp μ₀ are produced in batches of at most max_entries / n
// rows, so the full table is never held at once. Each batch contributes its
// tight pairs and its share of the optimality certificate.
TightScan tight_set_batched(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                            const Marginals& marginals, const PrimarySolution& primary, double tol,
                            int threads, std::size_t max_entries = std::size_t{1} << 22);

// Stage 1, tight set, stage 2, monotonicity and (optionally) rays.
PipelineResult run_pipeline(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                            double delta, const Marginals& marginals,
                            const PipelineOptions& options = {});

// Runs the two-stage solver on the graph behind a tiny instance and reports
// the result in source/target index form.
TinySolution solve_tiny_instance(const TinyInstance& instance, const PipelineOptions& options = {});

}  // namespace monge
