#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "monge/geometry.hpp"

namespace monge {

struct FlowArc {
  NodeId from = 0;
  NodeId to = 0;
  double cost = 0.0;  // must be positive
};

struct FlowSolution {
  std::vector<double> flow;       // per arc
  std::vector<double> potential;  // p(to) - p(from) <= cost, equality where flow > 0
  double cost = 0.0;
  std::size_t augmentations = 0;
};

// Uncapacitated min-cost flow by successive shortest paths. supply[v] > 0 is
// mass leaving v, < 0 mass arriving; supplies must sum to zero. Each round
// runs a multi-source Dijkstra on reduced costs from every node with remaining
// supply and stops at the first node with remaining demand. Ties go to the
// lowest node index.
FlowSolution min_cost_flow(std::size_t node_count, std::span<const FlowArc> arcs,
                           std::span<const double> supply, double mass_eps = 1e-14);

}  // namespace monge
