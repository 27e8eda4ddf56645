#include "monge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "monge/error.hpp"

namespace monge {

namespace {

constexpr double kTie = 1e-9;

// Plain Floyd–Warshall; kept separate from the solver's Dijkstra on purpose.
std::vector<std::vector<double>> floyd_warshall(std::size_t n, const std::vector<Edge>& edges,
                                                const std::vector<double>& weight) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& slot = d[static_cast<std::size_t>(edges[e].source)][static_cast<std::size_t>(edges[e].target)];
    slot = std::min(slot, weight[e]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  return d;
}

std::vector<NodeId> pick_distinct(std::mt19937_64& rng, std::size_t pool, int count) {
  std::vector<NodeId> all(pool);
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[pick(rng)]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

TinyInstance synthetic_instance(std::mt19937_64& rng, int n) {
  const std::size_t nodes = 2 * static_cast<std::size_t>(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.1, 1.0);

  GraphSpec spec;
  for (std::size_t v = 0; v < nodes; ++v) spec.positions.emplace_back(unit(rng), unit(rng));
  std::vector<std::vector<bool>> used(nodes, std::vector<bool>(nodes, false));
  auto add = [&](std::size_t s, std::size_t t) {
    if (s == t || used[s][t]) return;
    used[s][t] = true;
    Vec2 d = spec.positions[t] - spec.positions[s];
    if (d.norm() == 0.0) d = Vec2(1e-3, 0.0);
    spec.edges.push_back({static_cast<NodeId>(s), static_cast<NodeId>(t), d});
  };
  for (std::size_t v = 0; v < nodes; ++v) add(v, (v + 1) % nodes);  // ring keeps it connected
  std::uniform_int_distribution<std::size_t> node(0, nodes - 1);
  for (std::size_t k = 0; k < 2 * nodes; ++k) add(node(rng), node(rng));

  auto manifold = std::make_shared<const DiscreteManifold>(load_graph(spec));
  std::vector<double> w(manifold->edge_count());
  for (double& x : w) x = weight(rng);
  const auto dist = floyd_warshall(nodes, manifold->edges(), w);

  TinyInstance inst;
  inst.n = n;
  GraphBacking backing;
  backing.manifold = manifold;
  backing.edge_costs = explicit_edge_costs(w);
  backing.sources = pick_distinct(rng, nodes, n);
  backing.targets = pick_distinct(rng, nodes, n);
  inst.cost.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      inst.cost[i][j] = dist[static_cast<std::size_t>(backing.sources[i])]
                            [static_cast<std::size_t>(backing.targets[j])];
    }
  }
  inst.backing = std::move(backing);
  return inst;
}

TinyInstance sliced_instance(std::mt19937_64& rng, int n) {
  constexpr int kSide = 6;
  auto manifold = std::make_shared<const DiscreteManifold>(build_torus_grid(kSide, Stencil::k8));
  const std::size_t nodes = manifold->node_count();
  std::uniform_real_distribution<double> drift(-0.4, 0.4);
  std::uniform_real_distribution<double> stretch(0.6, 1.6);
  std::vector<Mat2> g(nodes);
  std::vector<Vec2> omega(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    const double a = stretch(rng), b = stretch(rng);
    g[v] << a, 0.0, 0.0, b;
    omega[v] = Vec2(drift(rng), drift(rng)) * std::sqrt(std::min(a, b));
  }
  const FinslerMetric metric = FinslerMetric::randers(std::move(g), std::move(omega));
  std::vector<EdgeCost> costs = compute_edge_costs(*manifold, CostModel::finsler(metric));

  GraphBacking backing;
  backing.sources = pick_distinct(rng, nodes, n);
  backing.targets = pick_distinct(rng, nodes, n);
  const CostTable table = cost_rows(*manifold, costs, backing.sources, 1);

  TinyInstance inst;
  inst.n = n;
  inst.cost.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) inst.cost[i][j] = table.at(backing.sources[i], backing.targets[j]);
  }
  backing.manifold = manifold;
  backing.edge_costs = std::move(costs);
  inst.backing = std::move(backing);
  return inst;
}

}  // namespace

BruteResult brute_lexicographic(const TinyInstance& instance) {
  const int n = instance.n;
  if (n < 1 || n > kMaxOracleSize) {
    throw Error(ErrorKind::kSize, "brute force needs 1 <= n <= 8, got " + std::to_string(n));
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  struct Candidate {
    std::vector<int> perm;
    double primary, secondary;
  };
  std::vector<Candidate> all;
  do {
    double p = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) {
      p += instance.cost[i][perm[i]];
      s += instance.sigma(i, perm[i]);
    }
    all.push_back({perm, p, s});
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Permutations arrive in lexicographic order, so keeping the first strict
  // improvement realises the final tie-break.
  std::size_t best = 0;
  for (std::size_t k = 1; k < all.size(); ++k) {
    const Candidate& c = all[k];
    const Candidate& b = all[best];
    if (c.primary < b.primary - kTie ||
        (std::abs(c.primary - b.primary) <= kTie && c.secondary < b.secondary - kTie)) {
      best = k;
    }
  }
  BruteResult out;
  out.permutation = all[best].perm;
  out.primary = all[best].primary;
  out.secondary = all[best].secondary;
  out.runner_up_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (k == best) continue;
    const double dp = all[k].primary - out.primary;
    const double gap = dp > kTie ? dp : all[k].secondary - out.secondary;
    out.runner_up_gap = std::min(out.runner_up_gap, gap);
  }
  out.unique = !(out.runner_up_gap <= kTie);
  return out;
}

TinyInstance random_instance(std::uint64_t seed, int n, OracleMode mode) {
  if (n < 1 || n > kMaxOracleSize) {
    throw Error(ErrorKind::kSize, "tiny instances need 1 <= n <= 8, got " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  return mode == OracleMode::kSyntheticMetric ? synthetic_instance(rng, n) : sliced_instance(rng, n);
}

OracleVerdict compare(const TinyInstance& instance, const BruteResult& oracle,
                      const TinySolution& solution) {
  OracleVerdict v;
  const double n = instance.n;
  v.primary_error = std::abs(solution.primary * n - oracle.primary);
  v.secondary_error = std::abs(solution.secondary * n - oracle.secondary);
  const bool values = v.primary_error <= kTie && v.secondary_error <= kTie;
  if (values && oracle.unique) {
    v.support_compared = true;
    std::vector<std::pair<int, int>> expected;
    for (int i = 0; i < instance.n; ++i) expected.emplace_back(i, oracle.permutation[i]);
    std::vector<std::pair<int, int>> got = solution.support;
    std::sort(got.begin(), got.end());
    v.support_match = got == expected;
  }
  v.pass = values && v.support_match;
  if (!values) {
    v.message = "objective mismatch: primary error " + std::to_string(v.primary_error) +
                ", secondary error " + std::to_string(v.secondary_error);
  } else if (!v.support_match) {
    v.message = "support differs from the unique optimum";
  } else {
    v.message = oracle.unique ? "match" : "match (ties, support not compared)";
  }
  return v;
}

std::string to_string(OracleMode mode) {
  return mode == OracleMode::kSyntheticMetric ? "synthetic" : "sliced";
}

OracleMode parse_oracle_mode(const std::string& text) {
  if (text == "synthetic" || text == "synthetic-metric") return OracleMode::kSyntheticMetric;
  if (text == "sliced" || text == "sliced-from-cost-field") return OracleMode::kSlicedFromCostField;
  throw Error(ErrorKind::kInvalidConfig, "unknown oracle mode '" + text + "'");
}

}  // namespace monge
