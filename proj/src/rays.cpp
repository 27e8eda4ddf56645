#include "monge/rays.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

#include "monge/error.hpp"

namespace monge {

CalibratedGraph calibrated_edges(const DiscreteManifold& manifold,
                                 std::span<const EdgeCost> edge_costs,
                                 const DualPotential& potential, double tol_cal) {
  CalibratedGraph g;
  const std::size_t n = manifold.node_count();
  g.node_count = n;
  g.out.resize(n);
  g.in.resize(n);
  const auto& u = potential.u;
  for (std::size_t i = 0; i < manifold.edge_count(); ++i) {
    const Edge& e = manifold.edge(static_cast<EdgeId>(i));
    const double gain = u[static_cast<std::size_t>(e.target)] - u[static_cast<std::size_t>(e.source)];
    if (gain < edge_costs[i].weight - tol_cal) continue;
    const std::size_t k = g.edges.size();
    g.edges.push_back(static_cast<EdgeId>(i));
    g.from.push_back(e.source);
    g.to.push_back(e.target);
    g.time.push_back(edge_costs[i].time);
    g.gain.push_back(gain);
    g.out[static_cast<std::size_t>(e.source)].push_back(k);
    g.in[static_cast<std::size_t>(e.target)].push_back(k);
  }

  // Kahn with a min-heap so the order is deterministic.
  std::vector<std::size_t> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = g.in[v].size();
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(static_cast<NodeId>(v));
  }
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    g.topological_order.push_back(v);
    for (std::size_t k : g.out[static_cast<std::size_t>(v)]) {
      const auto w = static_cast<std::size_t>(g.to[k]);
      if (--indegree[w] == 0) ready.push(static_cast<NodeId>(w));
    }
  }
  if (g.topological_order.size() != n) {
    throw Error(ErrorKind::kTolerance,
                "calibrated edges contain a cycle; tol_cal = " + std::to_string(tol_cal) +
                    " is too loose");
  }
  return g;
}

AlphaBeta alpha_beta(const CalibratedGraph& graph) {
  AlphaBeta ab;
  ab.alpha.assign(graph.node_count, 0.0);
  ab.beta.assign(graph.node_count, 0.0);
  for (NodeId v : graph.topological_order) {
    for (std::size_t k : graph.out[static_cast<std::size_t>(v)]) {
      auto& a = ab.alpha[static_cast<std::size_t>(graph.to[k])];
      a = std::max(a, ab.alpha[static_cast<std::size_t>(v)] + graph.time[k]);
    }
  }
  for (auto it = graph.topological_order.rbegin(); it != graph.topological_order.rend(); ++it) {
    for (std::size_t k : graph.out[static_cast<std::size_t>(*it)]) {
      auto& b = ab.beta[static_cast<std::size_t>(*it)];
      b = std::max(b, graph.time[k] + ab.beta[static_cast<std::size_t>(graph.to[k])]);
    }
  }
  return ab;
}

RayClasses classify(const AlphaBeta& ab, double epsilon) {
  RayClasses out;
  for (std::size_t v = 0; v < ab.alpha.size(); ++v) {
    const double a = ab.alpha[v], b = ab.beta[v];
    if (!(a + b > 0.0)) continue;
    out.transport.push_back(static_cast<NodeId>(v));
    if (a > epsilon && b > epsilon) out.interior.push_back(static_cast<NodeId>(v));
    if (!(a > 0.0 && b > 0.0)) out.ends.push_back(static_cast<NodeId>(v));
  }
  return out;
}

std::vector<std::vector<NodeId>> maximal_chains(const CalibratedGraph& graph,
                                                const AlphaBeta& ab) {
  std::vector<bool> covered(graph.edges.size(), false);
  std::vector<std::vector<NodeId>> chains;

  auto best_in = [&](NodeId v) {
    std::size_t best = graph.edges.size();
    double best_value = -1.0;
    for (std::size_t k : graph.in[static_cast<std::size_t>(v)]) {
      const double value = ab.alpha[static_cast<std::size_t>(graph.from[k])] + graph.time[k];
      if (value > best_value || (value == best_value && graph.from[k] < graph.from[best])) {
        best_value = value;
        best = k;
      }
    }
    return best;
  };
  auto best_out = [&](NodeId v) {
    std::size_t best = graph.edges.size();
    double best_value = -1.0;
    for (std::size_t k : graph.out[static_cast<std::size_t>(v)]) {
      const double value = graph.time[k] + ab.beta[static_cast<std::size_t>(graph.to[k])];
      if (value > best_value || (value == best_value && graph.to[k] < graph.to[best])) {
        best_value = value;
        best = k;
      }
    }
    return best;
  };

  for (NodeId v : graph.topological_order) {
    for (std::size_t seed : graph.out[static_cast<std::size_t>(v)]) {
      if (covered[seed]) continue;
      std::vector<NodeId> back;
      for (NodeId x = graph.from[seed];;) {
        const std::size_t k = best_in(x);
        if (k == graph.edges.size()) break;
        covered[k] = true;
        x = graph.from[k];
        back.push_back(x);
      }
      std::vector<NodeId> chain(back.rbegin(), back.rend());
      chain.push_back(graph.from[seed]);
      covered[seed] = true;
      chain.push_back(graph.to[seed]);
      for (NodeId x = graph.to[seed];;) {
        const std::size_t k = best_out(x);
        if (k == graph.edges.size()) break;
        covered[k] = true;
        x = graph.to[k];
        chain.push_back(x);
      }
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

bool calibrated_path_exists(const CalibratedGraph& graph, NodeId x, NodeId y) {
  if (x == y) return true;
  std::vector<bool> seen(graph.node_count, false);
  std::queue<NodeId> queue;
  queue.push(x);
  seen[static_cast<std::size_t>(x)] = true;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop();
    for (std::size_t k : graph.out[static_cast<std::size_t>(v)]) {
      const NodeId w = graph.to[k];
      if (w == y) return true;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        queue.push(w);
      }
    }
  }
  return false;
}

RayAudit ray_audits(const CalibratedGraph& graph, std::span<const std::vector<NodeId>> chains,
                    const TransportPlan& plan, std::span<const NodeId> lambda, double delta) {
  RayAudit audit;
  audit.calibrated_edges = graph.edges.size();
  audit.chains = chains.size();
  audit.min_speed_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const double ratio = graph.gain[k] / graph.time[k];
    audit.min_speed_ratio = std::min(audit.min_speed_ratio, ratio);
    if (ratio < delta - 1e-9) ++audit.speed_violations;
  }
  if (graph.edges.empty()) audit.min_speed_ratio = 0.0;

  std::unordered_map<NodeId, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    if (plan.entries[i].mass >= 1e-12) by_source[plan.entries[i].source].push_back(i);
  }
  std::vector<bool> in_lambda(graph.node_count, false);
  for (NodeId v : lambda) in_lambda[static_cast<std::size_t>(v)] = true;

  std::unordered_map<NodeId, std::size_t> position;
  for (const auto& chain : chains) {
    position.clear();
    for (std::size_t k = 0; k < chain.size(); ++k) position.emplace(chain[k], k);
    std::size_t lambda_here = 0;
    std::vector<std::pair<std::size_t, std::size_t>> placed;  // (pos source, pos target)
    for (std::size_t k = 0; k < chain.size(); ++k) {
      if (in_lambda[static_cast<std::size_t>(chain[k])]) ++lambda_here;
      auto it = by_source.find(chain[k]);
      if (it == by_source.end()) continue;
      for (std::size_t i : it->second) {
        auto t = position.find(plan.entries[i].target);
        if (t != position.end()) placed.emplace_back(k, t->second);
      }
    }
    for (std::size_t a = 0; a < placed.size(); ++a) {
      for (std::size_t b = 0; b < placed.size(); ++b) {
        if (placed[a].first < placed[b].first) {
          ++audit.order_pairs;
          if (placed[a].second > placed[b].second) ++audit.order_violations;
        }
      }
    }
    audit.max_lambda_per_chain = std::max(audit.max_lambda_per_chain, lambda_here);
    if (lambda_here > 0) ++audit.chains_with_lambda;
  }

  // One forward search per distinct source.
  std::vector<bool> seen(graph.node_count);
  for (const auto& [x, entries] : by_source) {
    std::fill(seen.begin(), seen.end(), false);
    std::queue<NodeId> queue;
    queue.push(x);
    seen[static_cast<std::size_t>(x)] = true;
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop();
      for (std::size_t k : graph.out[static_cast<std::size_t>(v)]) {
        const auto w = static_cast<std::size_t>(graph.to[k]);
        if (!seen[w]) {
          seen[w] = true;
          queue.push(graph.to[k]);
        }
      }
    }
    for (std::size_t i : entries) {
      if (!seen[static_cast<std::size_t>(plan.entries[i].target)]) ++audit.unjoined_support_pairs;
    }
  }
  return audit;
}

}  // namespace monge
