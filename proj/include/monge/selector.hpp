#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "monge/ot_solver.hpp"

namespace monge {

struct MapEntry {
  NodeId source = 0;
  NodeId target = 0;
};

struct SelectionResult {
  TransportPlan plan;           // primary_cost = Σ c·mass
  double secondary_cost = 0.0;  // Σ c²·mass
  std::vector<MapEntry> map;    // single-valued sources
  std::vector<NodeId> lambda;   // sources with two or more targets
  double lambda_mass = 0.0;
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
};

// Plan entries below this mass are dropped before Λ is counted.
inline constexpr double kPruneMass = 1e-12;

// Minimises Σ σ·mass with σ = c² over plans supported on the tight pairs.
// Throws restriction-error when the tight pairs cannot carry both marginals.
SelectionResult solve_secondary(std::span<const TightPair> tight, const Marginals& marginals);

struct MapExtraction {
  std::vector<MapEntry> map;
  std::vector<NodeId> lambda;
  double lambda_mass = 0.0;
};

MapExtraction extract_map(const TransportPlan& plan);

struct MonotonicityReport {
  std::size_t quadruples = 0;   // support entry pairs examined
  std::size_t applicable = 0;   // both swapped pairs tight
  double min_increment = 0.0;   // min σ(x,y′)+σ(x′,y)−σ(x,y)−σ(x′,y′)
  std::size_t negative = 0;     // increments below −1e−9
  std::size_t on_common_chain = 0;
  double min_factored = 0.0;    // min (u(y)−u(y′))(u(x)−u(x′)) on common chains
};

// Transposition test on the plan support. Swaps are applicable when (x,y′) and
// (x′,y) are both in `tight`. All entry pairs are examined when there are at
// most sample_count of them, otherwise sample_count random pairs. With chains
// given, quadruples whose four nodes share a chain also get the factored form
// evaluated with u.
MonotonicityReport monotonicity_check(const TransportPlan& plan, std::span<const TightPair> tight,
                                      const DualPotential& potential, std::size_t sample_count,
                                      std::uint64_t seed = 1,
                                      std::span<const std::vector<NodeId>> chains = {});

}  // namespace monge
