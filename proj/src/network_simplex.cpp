#include "monge/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monge/error.hpp"

namespace monge {

namespace {

// Mass below this is treated as zero when deciding degeneracy and blocking.
constexpr double kZeroFlow = 1e-15;

struct Arc {
  int from;
  int to;
  double cost;
};

class SimplexState {
 public:
  SimplexState(std::size_t node_count, std::vector<Arc> arcs, std::vector<double> balance,
               std::vector<int> tree)
      : n_(node_count),
        root_(static_cast<int>(node_count) - 1),
        arcs_(std::move(arcs)),
        balance_(std::move(balance)),
        tree_(std::move(tree)),
        adjacency_(node_count),
        parent_(node_count),
        parent_arc_(node_count),
        depth_(node_count),
        order_(node_count),
        pi_(node_count),
        flow_(arcs_.size(), 0.0),
        in_tree_(arcs_.size(), false) {
    for (int a : tree_) in_tree_[static_cast<std::size_t>(a)] = true;
    rebuild();
  }

  double reduced_cost(std::size_t a) const {
    const Arc& arc = arcs_[a];
    return arc.cost + pi_[static_cast<std::size_t>(arc.from)] - pi_[static_cast<std::size_t>(arc.to)];
  }

  bool in_tree(std::size_t a) const { return in_tree_[a]; }
  double flow(std::size_t a) const { return flow_[a]; }

  // Returns true when the pivot was degenerate.
  bool pivot(std::size_t entering) {
    const Arc& e = arcs_[entering];
    const int k = e.from;
    const int l = e.to;

    // Tree paths from k and l up to their common ancestor.
    std::vector<int> up_k, up_l;  // node sequences excluding the apex
    int a = k, b = l;
    while (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) {
      up_k.push_back(a);
      a = parent_[static_cast<std::size_t>(a)];
    }
    while (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) {
      up_l.push_back(b);
      b = parent_[static_cast<std::size_t>(b)];
    }
    while (a != b) {
      up_k.push_back(a);
      a = parent_[static_cast<std::size_t>(a)];
      up_l.push_back(b);
      b = parent_[static_cast<std::size_t>(b)];
    }

    // Cycle order starting at the apex: down to k, across the entering arc,
    // up from l. Record each tree arc with whether the cycle runs against it.
    struct Step {
      int arc;
      bool backward;
    };
    std::vector<Step> cycle;
    cycle.reserve(up_k.size() + up_l.size());
    for (auto it = up_k.rbegin(); it != up_k.rend(); ++it) {
      const int v = *it;
      const int arc = parent_arc_[static_cast<std::size_t>(v)];
      // Walking parent → v; backward if the arc points v → parent.
      cycle.push_back({arc, arcs_[static_cast<std::size_t>(arc)].from == v});
    }
    for (int v : up_l) {
      const int arc = parent_arc_[static_cast<std::size_t>(v)];
      // Walking v → parent; backward if the arc points parent → v.
      cycle.push_back({arc, arcs_[static_cast<std::size_t>(arc)].to == v});
    }

    double theta = std::numeric_limits<double>::infinity();
    for (const Step& s : cycle) {
      if (s.backward) theta = std::min(theta, flow_[static_cast<std::size_t>(s.arc)]);
    }
    if (!std::isfinite(theta)) {
      throw Error(ErrorKind::kRestriction, "unbounded transportation problem");
    }
    int leaving = -1;
    for (const Step& s : cycle) {
      if (s.backward && flow_[static_cast<std::size_t>(s.arc)] <= theta + kZeroFlow) leaving = s.arc;
    }

    in_tree_[static_cast<std::size_t>(leaving)] = false;
    in_tree_[entering] = true;
    std::replace(tree_.begin(), tree_.end(), leaving, static_cast<int>(entering));
    rebuild();
    return theta <= kZeroFlow;
  }

 private:
  // Re-derive parents, depths and potentials by BFS from the root, then the
  // flows by peeling leaves towards the root.
  void rebuild() {
    for (auto& list : adjacency_) list.clear();
    for (int a : tree_) {
      const Arc& arc = arcs_[static_cast<std::size_t>(a)];
      adjacency_[static_cast<std::size_t>(arc.from)].push_back(a);
      adjacency_[static_cast<std::size_t>(arc.to)].push_back(a);
    }
    std::fill(parent_.begin(), parent_.end(), -2);
    parent_[static_cast<std::size_t>(root_)] = -1;
    parent_arc_[static_cast<std::size_t>(root_)] = -1;
    depth_[static_cast<std::size_t>(root_)] = 0;
    pi_[static_cast<std::size_t>(root_)] = 0.0;
    std::size_t head = 0, tail = 0;
    order_[tail++] = root_;
    while (head < tail) {
      const int v = order_[head++];
      for (int a : adjacency_[static_cast<std::size_t>(v)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        const int w = arc.from == v ? arc.to : arc.from;
        if (parent_[static_cast<std::size_t>(w)] != -2) continue;
        parent_[static_cast<std::size_t>(w)] = v;
        parent_arc_[static_cast<std::size_t>(w)] = a;
        depth_[static_cast<std::size_t>(w)] = depth_[static_cast<std::size_t>(v)] + 1;
        // Tree arcs have zero reduced cost: π(to) = π(from) + c.
        pi_[static_cast<std::size_t>(w)] = arc.from == v ? pi_[static_cast<std::size_t>(v)] + arc.cost
                                                         : pi_[static_cast<std::size_t>(v)] - arc.cost;
        order_[tail++] = w;
      }
    }
    if (tail != n_) throw Error(ErrorKind::kRestriction, "basis is not a spanning tree");

    std::vector<double> net(balance_);
    for (std::size_t i = n_; i-- > 1;) {
      const int v = order_[i];
      const int a = parent_arc_[static_cast<std::size_t>(v)];
      const Arc& arc = arcs_[static_cast<std::size_t>(a)];
      double f = arc.from == v ? net[static_cast<std::size_t>(v)] : -net[static_cast<std::size_t>(v)];
      if (std::abs(f) < kZeroFlow) f = 0.0;
      flow_[static_cast<std::size_t>(a)] = f;
      net[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])] += net[static_cast<std::size_t>(v)];
    }
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      if (!in_tree_[a]) flow_[a] = 0.0;
    }
  }

  std::size_t n_;
  int root_;
  std::vector<Arc> arcs_;
  std::vector<double> balance_;
  std::vector<int> tree_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> parent_;
  std::vector<int> parent_arc_;
  std::vector<int> depth_;
  std::vector<int> order_;
  std::vector<double> pi_;
  std::vector<double> flow_;
  std::vector<bool> in_tree_;
};

}  // namespace

NetworkSimplexResult solve_transportation(std::span<const double> supply,
                                          std::span<const double> demand,
                                          std::span<const TransportArc> arcs) {
  const std::size_t ns = supply.size();
  const std::size_t nt = demand.size();
  double total_s = 0.0, total_t = 0.0, max_cost = 0.0;
  for (double s : supply) {
    if (!(s > 0.0)) throw Error(ErrorKind::kMarginal, "supplies must be positive");
    total_s += s;
  }
  for (double d : demand) {
    if (!(d > 0.0)) throw Error(ErrorKind::kMarginal, "demands must be positive");
    total_t += d;
  }
  if (std::abs(total_s - total_t) > 1e-12 * std::max(1.0, total_s)) {
    throw Error(ErrorKind::kMarginal, "supply and demand totals differ");
  }
  for (const TransportArc& a : arcs) {
    if (a.from < 0 || static_cast<std::size_t>(a.from) >= ns || a.to < 0 ||
        static_cast<std::size_t>(a.to) >= nt || !(a.cost >= 0.0) || !std::isfinite(a.cost)) {
      throw Error(ErrorKind::kInvalidConfig, "malformed transportation arc");
    }
    max_cost = std::max(max_cost, a.cost);
  }

  // Nodes: supplies, then demands, then the root.
  const std::size_t node_count = ns + nt + 1;
  const int root = static_cast<int>(ns + nt);
  const double big_m = static_cast<double>(node_count) * (max_cost + 1.0);
  std::vector<Arc> all;
  all.reserve(arcs.size() + ns + nt);
  for (const TransportArc& a : arcs) all.push_back({a.from, static_cast<int>(ns) + a.to, a.cost});
  std::vector<int> tree;
  for (std::size_t i = 0; i < ns; ++i) {
    tree.push_back(static_cast<int>(all.size()));
    all.push_back({static_cast<int>(i), root, big_m});
  }
  for (std::size_t j = 0; j < nt; ++j) {
    tree.push_back(static_cast<int>(all.size()));
    all.push_back({root, static_cast<int>(ns + j), big_m});
  }
  std::vector<double> balance(node_count, 0.0);
  for (std::size_t i = 0; i < ns; ++i) balance[i] = supply[i];
  for (std::size_t j = 0; j < nt; ++j) balance[ns + j] = -demand[j];

  const std::size_t m = all.size();
  SimplexState state(node_count, std::move(all), std::move(balance), std::move(tree));

  NetworkSimplexResult result;
  const double eps = 1e-11 * (1.0 + max_cost);
  const std::size_t block = std::max<std::size_t>(
      16, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m)))));
  std::size_t start = 0;
  while (true) {
    std::size_t best = m;
    double best_rc = -eps;
    std::size_t scanned = 0;
    std::size_t pos = start;
    while (scanned < m) {
      const std::size_t end = std::min(scanned + block, m);
      for (; scanned < end; ++scanned) {
        if (!state.in_tree(pos)) {
          const double rc = state.reduced_cost(pos);
          if (rc < best_rc || (rc == best_rc && best < m && pos < best)) {
            best_rc = rc;
            best = pos;
          }
        }
        pos = pos + 1 == m ? 0 : pos + 1;
      }
      if (best < m) break;
    }
    if (best == m) break;
    start = pos;
    ++result.pivots;
    if (state.pivot(best)) ++result.degenerate_pivots;
  }

  result.flow.resize(arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    result.flow[a] = state.flow(a);
    result.objective += arcs[a].cost * result.flow[a];
  }
  for (std::size_t a = arcs.size(); a < m; ++a) result.artificial_flow += state.flow(a);
  return result;
}

}  // namespace monge
