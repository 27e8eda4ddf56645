#include "monge/min_cost_flow.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "monge/error.hpp"

namespace monge {

FlowSolution min_cost_flow(std::size_t node_count, std::span<const FlowArc> arcs,
                           std::span<const double> supply, double mass_eps) {
  const std::size_t n = node_count;
  const std::size_t m = arcs.size();
  if (supply.size() != n) throw Error(ErrorKind::kMarginal, "supply vector has the wrong size");

  // Residual adjacency: entry a >= 0 is forward arc a, entry ~a its reverse.
  std::vector<std::vector<std::ptrdiff_t>> residual(n);
  for (std::size_t a = 0; a < m; ++a) {
    if (!(arcs[a].cost > 0.0)) {
      throw Error(ErrorKind::kSupercriticalityViolated, "flow arc with nonpositive cost");
    }
    residual[static_cast<std::size_t>(arcs[a].from)].push_back(static_cast<std::ptrdiff_t>(a));
    residual[static_cast<std::size_t>(arcs[a].to)].push_back(~static_cast<std::ptrdiff_t>(a));
  }

  FlowSolution out;
  out.flow.assign(m, 0.0);
  out.potential.assign(n, 0.0);
  std::vector<double> remaining(supply.begin(), supply.end());
  std::vector<double>& p = out.potential;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n);
  std::vector<std::ptrdiff_t> via(n);
  std::vector<bool> done(n);
  using Item = std::pair<double, NodeId>;
  constexpr std::ptrdiff_t kRoot = std::numeric_limits<std::ptrdiff_t>::min();

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via.begin(), via.end(), kRoot);
    std::fill(done.begin(), done.end(), false);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t v = 0; v < n; ++v) {
      if (remaining[v] > mass_eps) {
        dist[v] = 0.0;
        heap.emplace(0.0, static_cast<NodeId>(v));
      }
    }
    if (heap.empty()) break;

    NodeId sink = -1;
    while (!heap.empty()) {
      const auto [d, x] = heap.top();
      heap.pop();
      const auto xi = static_cast<std::size_t>(x);
      if (done[xi]) continue;
      done[xi] = true;
      if (remaining[xi] < -mass_eps) {
        sink = x;
        break;
      }
      for (std::ptrdiff_t entry : residual[xi]) {
        std::size_t a;
        NodeId y;
        double reduced;
        if (entry >= 0) {
          a = static_cast<std::size_t>(entry);
          y = arcs[a].to;
          reduced = arcs[a].cost + p[xi] - p[static_cast<std::size_t>(y)];
        } else {
          a = static_cast<std::size_t>(~entry);
          if (out.flow[a] <= mass_eps) continue;
          y = arcs[a].from;
          reduced = -arcs[a].cost + p[xi] - p[static_cast<std::size_t>(y)];
        }
        reduced = std::max(reduced, 0.0);
        const auto yi = static_cast<std::size_t>(y);
        if (!done[yi] && d + reduced < dist[yi]) {
          dist[yi] = d + reduced;
          via[yi] = entry;
          heap.emplace(dist[yi], y);
        }
      }
    }
    if (sink < 0) throw Error(ErrorKind::kMarginal, "supply cannot reach any demand node");

    const double limit = dist[static_cast<std::size_t>(sink)];
    for (std::size_t v = 0; v < n; ++v) p[v] += std::min(dist[v], limit);

    // Trace back to the path origin and find the bottleneck.
    double amount = -remaining[static_cast<std::size_t>(sink)];
    NodeId v = sink;
    while (via[static_cast<std::size_t>(v)] != kRoot) {
      const std::ptrdiff_t entry = via[static_cast<std::size_t>(v)];
      if (entry >= 0) {
        v = arcs[static_cast<std::size_t>(entry)].from;
      } else {
        const auto a = static_cast<std::size_t>(~entry);
        amount = std::min(amount, out.flow[a]);
        v = arcs[a].to;
      }
    }
    const NodeId origin = v;
    amount = std::min(amount, remaining[static_cast<std::size_t>(origin)]);

    for (NodeId w = sink; w != origin;) {
      const std::ptrdiff_t entry = via[static_cast<std::size_t>(w)];
      if (entry >= 0) {
        out.flow[static_cast<std::size_t>(entry)] += amount;
        w = arcs[static_cast<std::size_t>(entry)].from;
      } else {
        const auto a = static_cast<std::size_t>(~entry);
        out.flow[a] = std::max(0.0, out.flow[a] - amount);
        w = arcs[a].to;
      }
    }
    remaining[static_cast<std::size_t>(origin)] -= amount;
    remaining[static_cast<std::size_t>(sink)] += amount;
    ++out.augmentations;
  }

  for (std::size_t a = 0; a < m; ++a) out.cost += out.flow[a] * arcs[a].cost;
  return out;
}

}  // namespace monge
