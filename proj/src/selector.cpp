#include "monge/selector.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <random>
#include <unordered_map>

#include "monge/error.hpp"
#include "monge/network_simplex.hpp"

namespace monge {

namespace {

std::uint64_t pair_key(NodeId x, NodeId y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint32_t>(y);
}

}  // namespace

SelectionResult solve_secondary(std::span<const TightPair> tight, const Marginals& marginals) {
  const auto& s0 = marginals.support0();
  const auto& s1 = marginals.support1();
  std::vector<int> row(marginals.node_count(), -1), col(marginals.node_count(), -1);
  std::vector<double> supply, demand;
  for (NodeId x : s0) {
    row[static_cast<std::size_t>(x)] = static_cast<int>(supply.size());
    supply.push_back(marginals.mu0()[static_cast<std::size_t>(x)]);
  }
  for (NodeId y : s1) {
    col[static_cast<std::size_t>(y)] = static_cast<int>(demand.size());
    demand.push_back(marginals.mu1()[static_cast<std::size_t>(y)]);
  }

  std::vector<TransportArc> arcs;
  arcs.reserve(tight.size());
  for (const TightPair& p : tight) {
    const int i = row[static_cast<std::size_t>(p.source)];
    const int j = col[static_cast<std::size_t>(p.target)];
    if (i < 0 || j < 0) {
      throw Error(ErrorKind::kRestriction, "tight pair outside the marginal supports");
    }
    arcs.push_back({i, j, p.cost * p.cost});
  }

  const NetworkSimplexResult simplex = solve_transportation(supply, demand, arcs);
  if (simplex.artificial_flow > 1e-10) {
    throw Error(ErrorKind::kRestriction,
                "tight set cannot carry the marginals (unrouted mass " +
                    std::to_string(simplex.artificial_flow) + "); tol_tight is too small");
  }

  SelectionResult out;
  out.pivots = simplex.pivots;
  out.degenerate_pivots = simplex.degenerate_pivots;
  for (std::size_t a = 0; a < tight.size(); ++a) {
    const double mass = simplex.flow[a];
    if (mass < kPruneMass) continue;
    out.plan.entries.push_back({tight[a].source, tight[a].target, mass});
    out.plan.primary_cost += mass * tight[a].cost;
    out.secondary_cost += mass * tight[a].cost * tight[a].cost;
  }
  std::sort(out.plan.entries.begin(), out.plan.entries.end(), [](const auto& a, const auto& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  MapExtraction extraction = extract_map(out.plan);
  out.map = std::move(extraction.map);
  out.lambda = std::move(extraction.lambda);
  out.lambda_mass = extraction.lambda_mass;
  return out;
}

MapExtraction extract_map(const TransportPlan& plan) {
  std::vector<PlanEntry> entries;
  for (const PlanEntry& e : plan.entries) {
    if (e.mass >= kPruneMass) entries.push_back(e);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  MapExtraction out;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double mass = 0.0;
    while (j < entries.size() && entries[j].source == entries[i].source) mass += entries[j++].mass;
    if (j - i == 1) {
      out.map.push_back({entries[i].source, entries[i].target});
    } else {
      out.lambda.push_back(entries[i].source);
      out.lambda_mass += mass;
    }
    i = j;
  }
  return out;
}

MonotonicityReport monotonicity_check(const TransportPlan& plan, std::span<const TightPair> tight,
                                      const DualPotential& potential, std::size_t sample_count,
                                      std::uint64_t seed,
                                      std::span<const std::vector<NodeId>> chains) {
  std::unordered_map<std::uint64_t, double> tight_cost;
  tight_cost.reserve(tight.size());
  for (const TightPair& p : tight) tight_cost.emplace(pair_key(p.source, p.target), p.cost);

  // node -> (chain, position) memberships
  std::unordered_map<NodeId, std::vector<std::pair<std::size_t, std::size_t>>> on_chain;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t k = 0; k < chains[c].size(); ++k) on_chain[chains[c][k]].emplace_back(c, k);
  }
  auto chains_of = [&](NodeId v) {
    std::vector<std::size_t> ids;
    if (auto it = on_chain.find(v); it != on_chain.end()) {
      for (const auto& [c, k] : it->second) ids.push_back(c);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  auto share_chain = [&](std::initializer_list<NodeId> nodes) {
    std::vector<std::size_t> common;
    bool first = true;
    for (NodeId v : nodes) {
      std::vector<std::size_t> ids = chains_of(v);
      if (first) {
        common = std::move(ids);
        first = false;
      } else {
        std::vector<std::size_t> both;
        std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                              std::back_inserter(both));
        common = std::move(both);
      }
      if (common.empty()) return false;
    }
    return true;
  };

  const auto& u = potential.u;
  const std::vector<PlanEntry>& e = plan.entries;
  MonotonicityReport report;
  report.min_increment = std::numeric_limits<double>::infinity();
  report.min_factored = std::numeric_limits<double>::infinity();

  auto examine = [&](std::size_t i, std::size_t j) {
    ++report.quadruples;
    const NodeId x = e[i].source, y = e[i].target, xp = e[j].source, yp = e[j].target;
    const auto a = tight_cost.find(pair_key(x, yp));
    const auto b = tight_cost.find(pair_key(xp, y));
    const auto c = tight_cost.find(pair_key(x, y));
    const auto d = tight_cost.find(pair_key(xp, yp));
    if (a == tight_cost.end() || b == tight_cost.end() || c == tight_cost.end() ||
        d == tight_cost.end()) {
      return;
    }
    ++report.applicable;
    const double inc = a->second * a->second + b->second * b->second - c->second * c->second -
                       d->second * d->second;
    report.min_increment = std::min(report.min_increment, inc);
    if (inc < -1e-9) ++report.negative;
    if (!chains.empty() && share_chain({x, y, xp, yp})) {
      ++report.on_common_chain;
      const double f = (u[static_cast<std::size_t>(y)] - u[static_cast<std::size_t>(yp)]) *
                       (u[static_cast<std::size_t>(x)] - u[static_cast<std::size_t>(xp)]);
      report.min_factored = std::min(report.min_factored, f);
    }
  };

  const std::size_t n = e.size();
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  if (total <= sample_count) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) examine(i, j);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < sample_count; ++s) {
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      while (j == i) j = pick(rng);
      examine(i, j);
    }
  }
  if (report.applicable == 0) report.min_increment = 0.0;
  if (report.on_common_chain == 0) report.min_factored = 0.0;
  return report;
}

}  // namespace monge
