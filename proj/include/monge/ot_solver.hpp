#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "monge/cost_engine.hpp"
#include "monge/geometry.hpp"

namespace monge {

// Node-indexed probability vectors. Validated on construction: nonnegative,
// finite, each summing to 1 within 1e-12.
class Marginals {
 public:
  Marginals(std::vector<double> mu0, std::vector<double> mu1);

  std::size_t node_count() const { return mu0_.size(); }
  const std::vector<double>& mu0() const { return mu0_; }
  const std::vector<double>& mu1() const { return mu1_; }
  const std::vector<NodeId>& support0() const { return support0_; }
  const std::vector<NodeId>& support1() const { return support1_; }

 private:
  std::vector<double> mu0_;
  std::vector<double> mu1_;
  std::vector<NodeId> support0_;
  std::vector<NodeId> support1_;
};

struct PlanEntry {
  NodeId source = 0;
  NodeId target = 0;
  double mass = 0.0;
  bool operator==(const PlanEntry&) const = default;
};

// Sparse coupling, entries sorted by (source, target).
struct TransportPlan {
  std::vector<PlanEntry> entries;
  double primary_cost = 0.0;
};

struct DualPotential {
  std::vector<double> u;
  NodeId anchor = 0;
};

struct PrimarySolution {
  TransportPlan plan;
  DualPotential potential;
  double optimal_value = 0.0;  // K
  double dual_value = 0.0;     // Σ u (μ₁ − μ₀)
  std::size_t augmentations = 0;
};

// Kantorovich problem for the shortest-path cost of the edge weights, solved
// as an uncapacitated flow of μ₀ − μ₁ over the edges. u is the flow's node
// potential shifted so that u(anchor) = 0, anchor = lowest node of supp μ₀.
// Throws marginal-error when the marginals do not fit the manifold.
PrimarySolution solve_primary(const DiscreteManifold& manifold,
                              std::span<const EdgeCost> edge_costs, const Marginals& marginals);

struct OptimalityCertificate {
  std::size_t pairs_checked = 0;
  double max_feasibility_violation = 0.0;  // max (u(y) − u(x) − c(x,y))₊
  double max_slackness_residual = 0.0;     // max |c − (u(y) − u(x))| on the plan support
  double plan_cost = 0.0;                  // ⟨c, μ⟩ from the table
  double dual_value = 0.0;                 // Σ u (μ₁ − μ₀), marginals read off the plan
  double duality_gap = 0.0;                // plan_cost − dual_value
};

// Feasibility is checked on every (x, y) with a row for x when pair_samples
// covers them all, otherwise on pair_samples random pairs.
OptimalityCertificate certify_optimality(const TransportPlan& plan,
                                         const DualPotential& potential, const CostTable& table,
                                         std::size_t pair_samples, std::uint64_t seed = 1);

struct TightPair {
  NodeId source = 0;
  NodeId target = 0;
  double cost = 0.0;
  bool operator==(const TightPair&) const = default;
};

// Pairs x ∈ supp μ₀, y ∈ supp μ₁ with |c(x,y) − (u(y) − u(x))| ≤ tol, in
// (source, target) order. Needs a table row for every x ∈ supp μ₀.
std::vector<TightPair> tight_set(const DualPotential& potential, const CostTable& table,
                                 const Marginals& marginals, double tol);

// 1e-9 · (1 + max edge weight).
double default_tight_tolerance(std::span<const EdgeCost> edge_costs);

}  // namespace monge
