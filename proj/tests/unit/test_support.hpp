#pragma once

#include <vector>

#include "monge/cost_engine.hpp"
#include "monge/geometry.hpp"

namespace monge::testing {

// 0 - 1 - ... - (n-1) with unit edges both ways, nodes on the x axis.
inline DiscreteManifold path_graph(int n) {
  GraphSpec spec;
  for (int i = 0; i < n; ++i) spec.positions.emplace_back(i, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    spec.edges.push_back({i, i + 1, Vec2(1.0, 0.0)});
    spec.edges.push_back({i + 1, i, Vec2(-1.0, 0.0)});
  }
  return load_graph(spec);
}

// Directed cycle 0 -> 1 -> ... -> 0 with unit steps.
inline DiscreteManifold directed_cycle(int n) {
  GraphSpec spec;
  for (int i = 0; i < n; ++i) spec.positions.emplace_back(i, 0.0);
  for (int i = 0; i < n; ++i) spec.edges.push_back({i, (i + 1) % n, Vec2(1.0, 0.0)});
  return load_graph(spec);
}

inline std::vector<EdgeCost> unit_costs(const DiscreteManifold& m) {
  return explicit_edge_costs(std::vector<double>(m.edge_count(), 1.0));
}

inline std::vector<double> point_mass(std::size_t n, std::vector<std::pair<int, double>> atoms) {
  std::vector<double> mu(n, 0.0);
  for (auto [i, m] : atoms) mu[static_cast<std::size_t>(i)] += m;
  return mu;
}

}  // namespace monge::testing
