#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace monge {

// Arc of a transportation problem: `from` indexes the supplies, `to` the
// demands.
struct TransportArc {
  int from = 0;
  int to = 0;
  double cost = 0.0;
};

struct NetworkSimplexResult {
  std::vector<double> flow;  // per input arc
  double objective = 0.0;    // Σ cost · flow over input arcs
  double artificial_flow = 0.0;
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
};

// Primal network simplex for min Σ c f subject to row sums = supply and column
// sums = demand, f ≥ 0. Starts from a big-M artificial tree hung off an extra
// root and keeps the basis strongly feasible, so degenerate pivots cannot
// cycle. Block pricing (most negative reduced cost within each block, lowest
// arc index on ties). All supplies and demands must be positive with equal
// totals. A nonzero artificial_flow means the arcs admit no feasible plan.
NetworkSimplexResult solve_transportation(std::span<const double> supply,
                                          std::span<const double> demand,
                                          std::span<const TransportArc> arcs);

}  // namespace monge
