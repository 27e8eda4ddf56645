#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "monge/cost_engine.hpp"
#include "monge/error.hpp"

namespace monge {

namespace {

enum class Regime { kSupercritical, kSubcritical, kIndeterminate };

struct ShiftEvaluation {
  Regime regime = Regime::kIndeterminate;
  LowerCertificate lower;
  UpperCertificate upper;
};

// Shortest hop path target → source, as edge ids.
std::vector<EdgeId> return_path(const DiscreteManifold& manifold, NodeId from, NodeId to) {
  std::vector<EdgeId> via(manifold.node_count(), -1);
  std::vector<bool> seen(manifold.node_count(), false);
  std::queue<NodeId> queue;
  queue.push(from);
  seen[static_cast<std::size_t>(from)] = true;
  while (!queue.empty() && !seen[static_cast<std::size_t>(to)]) {
    const NodeId x = queue.front();
    queue.pop();
    for (EdgeId id : manifold.out_edges(x)) {
      const NodeId y = manifold.edge(id).target;
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        via[static_cast<std::size_t>(y)] = id;
        queue.push(y);
      }
    }
  }
  std::vector<EdgeId> path;
  for (NodeId y = to; y != from;) {
    const EdgeId id = via[static_cast<std::size_t>(y)];
    path.push_back(id);
    y = manifold.edge(id).source;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double cycle_action(const DiscreteManifold& manifold, const Lagrangian& lagrangian,
                    const std::vector<EdgeId>& cycle, const std::vector<double>& times) {
  double total = 0.0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Edge& e = manifold.edge(cycle[i]);
    total += edge_action(lagrangian, e.source, e.displacement, times[i]);
  }
  return total;
}

double cycle_scale(const DiscreteManifold& manifold, const Lagrangian& lagrangian,
                   const std::vector<EdgeId>& cycle, const std::vector<double>& times) {
  double scale = 0.0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Edge& e = manifold.edge(cycle[i]);
    scale += std::abs(edge_action(lagrangian, e.source, e.displacement, times[i]));
  }
  return scale;
}

ShiftEvaluation evaluate_shift(const DiscreteManifold& manifold, const Lagrangian& family,
                               double shift, const ActionSolverOptions& options) {
  const Lagrangian lagrangian = family.with_shift(shift);
  const std::size_t m = manifold.edge_count();
  std::vector<ActionProbe> probes(m);
  bool all_positive = true;
  std::optional<EdgeId> subcritical;
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = manifold.edge(static_cast<EdgeId>(i));
    probes[i] = probe_edge_action(lagrangian, e.source, e.displacement, options);
    if (probes[i].status != ActionStatus::kRegular || !(probes[i].value > 0.0)) all_positive = false;
    if (probes[i].status == ActionStatus::kSubcritical && !subcritical) {
      subcritical = static_cast<EdgeId>(i);
    }
  }

  ShiftEvaluation out;
  if (all_positive) {
    out.regime = Regime::kSupercritical;
    out.upper.shift = shift;
    out.upper.min_edge_weight = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (probes[i].value < out.upper.min_edge_weight) {
        out.upper.min_edge_weight = probes[i].value;
        out.upper.argmin_edge = static_cast<EdgeId>(i);
      }
    }
    return out;
  }

  LowerCertificate& cert = out.lower;
  cert.shift = shift;
  if (subcritical) {
    const Edge& e = manifold.edge(*subcritical);
    cert.subcritical_edge = subcritical;
    cert.cycle.push_back(*subcritical);
    for (EdgeId id : return_path(manifold, e.target, e.source)) cert.cycle.push_back(id);
    cert.times.reserve(cert.cycle.size());
    for (EdgeId id : cert.cycle) cert.times.push_back(probes[static_cast<std::size_t>(id)].time);
    // The subcritical edge's action falls linearly in t; stretch it until the
    // closed walk is nonpositive.
    cert.cycle_action = cycle_action(manifold, lagrangian, cert.cycle, cert.times);
    for (int it = 0; it < 2000 && cert.cycle_action > 0.0; ++it) {
      cert.times[0] *= 2.0;
      cert.cycle_action = cycle_action(manifold, lagrangian, cert.cycle, cert.times);
    }
    out.regime = cert.cycle_action <= 0.0 ? Regime::kSubcritical : Regime::kIndeterminate;
    return out;
  }

  std::vector<WeightedArc> arcs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = manifold.edge(static_cast<EdgeId>(i));
    arcs[i] = {e.source, e.target, probes[i].value};
  }
  if (auto cycle = find_nonpositive_cycle(manifold.node_count(), arcs)) {
    for (std::size_t idx : *cycle) {
      cert.cycle.push_back(static_cast<EdgeId>(idx));
      cert.times.push_back(probes[idx].time);
    }
    cert.cycle_action = cycle_action(manifold, lagrangian, cert.cycle, cert.times);
    const double scale = cycle_scale(manifold, lagrangian, cert.cycle, cert.times);
    out.regime = cert.cycle_action <= 1e-12 * scale ? Regime::kSubcritical
                                                    : Regime::kIndeterminate;
    return out;
  }
  // Only boundary edges: the infimum is approached but not attained.
  out.regime = Regime::kIndeterminate;
  return out;
}

}  // namespace

std::optional<std::vector<std::size_t>> find_nonpositive_cycle(std::size_t node_count,
                                                               std::span<const WeightedArc> arcs) {
  const std::size_t n = node_count;
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < arcs.size(); ++i) out[static_cast<std::size_t>(arcs[i].from)].push_back(i);

  // Label-correcting relaxation from a virtual root joined to every node at 0.
  std::vector<double> dist(n, 0.0);
  std::vector<std::ptrdiff_t> parent_arc(n, -1);
  std::vector<std::size_t> relax_count(n, 0);
  std::vector<bool> queued(n, true);
  std::deque<NodeId> queue;
  for (std::size_t v = 0; v < n; ++v) queue.push_back(static_cast<NodeId>(v));

  auto extract_cycle = [&](NodeId start) -> std::optional<std::vector<std::size_t>> {
    NodeId v = start;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = parent_arc[static_cast<std::size_t>(v)];
      if (a < 0) return std::nullopt;
      v = arcs[static_cast<std::size_t>(a)].from;
    }
    std::vector<std::size_t> cycle;
    NodeId u = v;
    do {
      const auto a = parent_arc[static_cast<std::size_t>(u)];
      if (a < 0) return std::nullopt;
      cycle.push_back(static_cast<std::size_t>(a));
      u = arcs[static_cast<std::size_t>(a)].from;
    } while (u != v && cycle.size() <= n);
    if (u != v) return std::nullopt;
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
  };

  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    queued[static_cast<std::size_t>(x)] = false;
    for (std::size_t a : out[static_cast<std::size_t>(x)]) {
      const NodeId y = arcs[a].to;
      const double candidate = dist[static_cast<std::size_t>(x)] + arcs[a].weight;
      if (candidate < dist[static_cast<std::size_t>(y)]) {
        dist[static_cast<std::size_t>(y)] = candidate;
        parent_arc[static_cast<std::size_t>(y)] = static_cast<std::ptrdiff_t>(a);
        if (++relax_count[static_cast<std::size_t>(y)] >= n + 1) {
          if (auto cycle = extract_cycle(y)) return cycle;
        }
        if (!queued[static_cast<std::size_t>(y)]) {
          queued[static_cast<std::size_t>(y)] = true;
          queue.push_back(y);
        }
      }
    }
  }

  // No negative cycle: dist is a feasible potential. A zero cycle must consist
  // of arcs with zero reduced cost.
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto from = static_cast<std::size_t>(arcs[i].from);
    const auto to = static_cast<std::size_t>(arcs[i].to);
    const double reduced = arcs[i].weight + dist[from] - dist[to];
    if (reduced <= 1e-12 * (1.0 + std::abs(arcs[i].weight))) tight[from].push_back(i);
  }
  std::vector<int> color(n, 0);
  std::vector<std::ptrdiff_t> via(n, -1);
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == tight[v].size()) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t a = tight[v][next++];
      const auto w = static_cast<std::size_t>(arcs[a].to);
      if (color[w] == 0) {
        color[w] = 1;
        via[w] = static_cast<std::ptrdiff_t>(a);
        stack.emplace_back(w, 0);
      } else if (color[w] == 1) {
        std::vector<std::size_t> cycle{a};
        for (std::size_t u = v; u != w;) {
          const auto b = static_cast<std::size_t>(via[u]);
          cycle.push_back(b);
          u = static_cast<std::size_t>(arcs[b].from);
        }
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
    }
  }
  return std::nullopt;
}

CriticalValue critical_value(const DiscreteManifold& manifold, const Lagrangian& family,
                             double k_lo, double k_hi, double tolerance,
                             const ActionSolverOptions& options) {
  if (!(k_lo < k_hi) || !(tolerance > 0.0)) {
    throw Error(ErrorKind::kBracket, "need k_lo < k_hi and a positive tolerance");
  }
  ShiftEvaluation lo = evaluate_shift(manifold, family, k_lo, options);
  if (lo.regime != Regime::kSubcritical) {
    throw Error(ErrorKind::kBracket, "k_lo = " + std::to_string(k_lo) +
                                         " does not certify a nonpositive cycle");
  }
  ShiftEvaluation hi = evaluate_shift(manifold, family, k_hi, options);
  if (hi.regime != Regime::kSupercritical) {
    throw Error(ErrorKind::kBracket, "k_hi = " + std::to_string(k_hi) + " is not supercritical");
  }

  CriticalValue result;
  while (k_hi - k_lo > tolerance) {
    ++result.iterations;
    double mid = 0.5 * (k_lo + k_hi);
    ShiftEvaluation eval = evaluate_shift(manifold, family, mid, options);
    // A shift exactly at the threshold only approaches the infimum; step
    // towards k_lo until one side can be certified.
    for (int nudge = 0; nudge < 60 && eval.regime == Regime::kIndeterminate; ++nudge) {
      mid -= 0.25 * (mid - k_lo);
      eval = evaluate_shift(manifold, family, mid, options);
    }
    if (eval.regime == Regime::kSupercritical) {
      k_hi = mid;
      hi = std::move(eval);
    } else if (eval.regime == Regime::kSubcritical) {
      k_lo = mid;
      lo = std::move(eval);
    } else {
      throw Error(ErrorKind::kBracket, "could not certify either side near k = " +
                                           std::to_string(mid));
    }
  }
  result.k_lo = k_lo;
  result.k_hi = k_hi;
  result.estimate = 0.5 * (k_lo + k_hi);
  result.lower = std::move(lo.lower);
  result.upper = hi.upper;
  return result;
}

bool verify_lower_certificate(const DiscreteManifold& manifold, const Lagrangian& family,
                              const LowerCertificate& certificate) {
  const Lagrangian lagrangian = family.with_shift(certificate.shift);
  if (certificate.subcritical_edge) {
    const Edge& e = manifold.edge(*certificate.subcritical_edge);
    if (!(lagrangian.value(e.source, Vec2::Zero()) + certificate.shift < 0.0)) return false;
  }
  if (certificate.cycle.empty() || certificate.cycle.size() != certificate.times.size()) {
    return false;
  }
  for (std::size_t i = 0; i < certificate.cycle.size(); ++i) {
    const Edge& a = manifold.edge(certificate.cycle[i]);
    const Edge& b = manifold.edge(certificate.cycle[(i + 1) % certificate.cycle.size()]);
    if (a.target != b.source || !(certificate.times[i] > 0.0)) return false;
  }
  const double total = cycle_action(manifold, lagrangian, certificate.cycle, certificate.times);
  const double scale = cycle_scale(manifold, lagrangian, certificate.cycle, certificate.times);
  return total <= 1e-12 * scale;
}

bool verify_upper_certificate(const DiscreteManifold& manifold, const Lagrangian& family,
                              const UpperCertificate& certificate,
                              const ActionSolverOptions& options) {
  const Lagrangian lagrangian = family.with_shift(certificate.shift);
  double min_weight = std::numeric_limits<double>::infinity();
  for (const Edge& e : manifold.edges()) {
    const ActionProbe probe = probe_edge_action(lagrangian, e.source, e.displacement, options);
    if (probe.status != ActionStatus::kRegular || !(probe.value > 0.0)) return false;
    min_weight = std::min(min_weight, probe.value);
  }
  return min_weight > 0.0 && std::abs(min_weight - certificate.min_edge_weight) <=
                                 1e-12 * (1.0 + certificate.min_edge_weight);
}

}  // namespace monge
