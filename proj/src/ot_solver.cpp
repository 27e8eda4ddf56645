#include "monge/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "monge/error.hpp"
#include "monge/min_cost_flow.hpp"

namespace monge {

namespace {

constexpr double kMassEps = 1e-14;

void check_measure(const std::vector<double>& mu, const char* name) {
  double total = 0.0;
  for (double m : mu) {
    if (!std::isfinite(m) || m < 0.0) {
      throw Error(ErrorKind::kMarginal, std::string(name) + " has a negative or non-finite mass");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kMarginal,
                std::string(name) + " sums to " + std::to_string(total) + ", not 1");
  }
}

std::vector<NodeId> support_of(const std::vector<double>& mu) {
  std::vector<NodeId> s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) s.push_back(static_cast<NodeId>(i));
  }
  return s;
}

}  // namespace

Marginals::Marginals(std::vector<double> mu0, std::vector<double> mu1)
    : mu0_(std::move(mu0)), mu1_(std::move(mu1)) {
  if (mu0_.size() != mu1_.size() || mu0_.empty()) {
    throw Error(ErrorKind::kMarginal, "marginals must be nonempty and of equal length");
  }
  check_measure(mu0_, "mu0");
  check_measure(mu1_, "mu1");
  support0_ = support_of(mu0_);
  support1_ = support_of(mu1_);
}

PrimarySolution solve_primary(const DiscreteManifold& manifold,
                              std::span<const EdgeCost> edge_costs, const Marginals& marginals) {
  const std::size_t n = manifold.node_count();
  if (marginals.node_count() != n) {
    throw Error(ErrorKind::kMarginal, "marginals have " + std::to_string(marginals.node_count()) +
                                          " entries for " + std::to_string(n) + " nodes");
  }
  if (edge_costs.size() != manifold.edge_count()) {
    throw Error(ErrorKind::kInvalidConfig, "edge cost count does not match the manifold");
  }
  const auto& mu0 = marginals.mu0();
  const auto& mu1 = marginals.mu1();

  std::vector<FlowArc> arcs(manifold.edge_count());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Edge& e = manifold.edges()[i];
    arcs[i] = {e.source, e.target, edge_costs[i].weight};
  }
  std::vector<double> supply(n);
  for (std::size_t v = 0; v < n; ++v) supply[v] = mu0[v] - mu1[v];
  FlowSolution flow = min_cost_flow(n, arcs, supply, kMassEps);

  PrimarySolution out;
  out.augmentations = flow.augmentations;
  out.potential.anchor = marginals.support0().front();
  const double shift = flow.potential[static_cast<std::size_t>(out.potential.anchor)];
  out.potential.u.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.potential.u[v] = flow.potential[v] - shift;

  // Mass that stays put, then a greedy path decomposition of the flow.
  std::map<std::pair<NodeId, NodeId>, double> mass;
  for (std::size_t v = 0; v < n; ++v) {
    const double stay = std::min(mu0[v], mu1[v]);
    if (stay > 0.0) mass[{static_cast<NodeId>(v), static_cast<NodeId>(v)}] += stay;
  }
  std::vector<double> left = flow.flow;
  std::vector<double> excess(n), deficit(n);
  for (std::size_t v = 0; v < n; ++v) {
    excess[v] = std::max(0.0, supply[v]);
    deficit[v] = std::max(0.0, -supply[v]);
  }
  std::vector<std::size_t> visit_stamp(n, 0);
  std::size_t stamp = 0;
  double path_cost_total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    while (excess[s] > kMassEps) {
      ++stamp;
      std::vector<EdgeId> path;
      auto v = static_cast<NodeId>(s);
      visit_stamp[s] = stamp;
      double amount = excess[s];
      bool stuck = false;
      while (path.empty() || !(deficit[static_cast<std::size_t>(v)] > kMassEps)) {
        EdgeId best = -1;
        for (EdgeId id : manifold.out_edges(v)) {
          const auto a = static_cast<std::size_t>(id);
          if (left[a] > kMassEps &&
              (best < 0 || left[a] > left[static_cast<std::size_t>(best)])) {
            best = id;
          }
        }
        if (best < 0) {
          stuck = true;
          break;
        }
        path.push_back(best);
        amount = std::min(amount, left[static_cast<std::size_t>(best)]);
        v = manifold.edge(best).target;
        if (visit_stamp[static_cast<std::size_t>(v)] == stamp) {
          stuck = true;  // flow cycle; cannot happen with positive costs
          break;
        }
        visit_stamp[static_cast<std::size_t>(v)] = stamp;
      }
      if (stuck) break;
      const auto t = static_cast<std::size_t>(v);
      amount = std::min(amount, deficit[t]);
      double length = 0.0;
      for (EdgeId id : path) {
        left[static_cast<std::size_t>(id)] -= amount;
        length += edge_costs[static_cast<std::size_t>(id)].weight;
      }
      excess[s] -= amount;
      deficit[t] -= amount;
      mass[{static_cast<NodeId>(s), v}] += amount;
      path_cost_total += amount * length;
    }
  }

  out.plan.entries.reserve(mass.size());
  for (const auto& [key, m] : mass) out.plan.entries.push_back({key.first, key.second, m});
  out.plan.primary_cost = path_cost_total;
  out.optimal_value = flow.cost;
  for (std::size_t v = 0; v < n; ++v) out.dual_value += out.potential.u[v] * (mu1[v] - mu0[v]);
  return out;
}

OptimalityCertificate certify_optimality(const TransportPlan& plan,
                                         const DualPotential& potential, const CostTable& table,
                                         std::size_t pair_samples, std::uint64_t seed) {
  OptimalityCertificate cert;
  const auto& u = potential.u;
  auto residual = [&](NodeId x, NodeId y) {
    return table.at(x, y) - (u[static_cast<std::size_t>(y)] - u[static_cast<std::size_t>(x)]);
  };

  const std::vector<NodeId> rows = table.sources();
  const std::size_t n = table.node_count();
  const std::size_t total = rows.size() * n;
  if (total <= pair_samples) {
    for (NodeId x : rows) {
      for (std::size_t y = 0; y < n; ++y) {
        cert.max_feasibility_violation =
            std::max(cert.max_feasibility_violation, -residual(x, static_cast<NodeId>(y)));
      }
    }
    cert.pairs_checked = total;
  } else if (!rows.empty()) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_row(0, rows.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
    for (std::size_t k = 0; k < pair_samples; ++k) {
      const NodeId x = rows[pick_row(rng)];
      const auto y = static_cast<NodeId>(pick_node(rng));
      cert.max_feasibility_violation = std::max(cert.max_feasibility_violation, -residual(x, y));
    }
    cert.pairs_checked = pair_samples;
  }

  std::vector<double> net(n, 0.0);
  for (const PlanEntry& e : plan.entries) {
    const double r = residual(e.source, e.target);
    cert.max_slackness_residual = std::max(cert.max_slackness_residual, std::abs(r));
    cert.plan_cost += e.mass * table.at(e.source, e.target);
    net[static_cast<std::size_t>(e.target)] += e.mass;
    net[static_cast<std::size_t>(e.source)] -= e.mass;
  }
  for (std::size_t v = 0; v < n; ++v) cert.dual_value += u[v] * net[v];
  cert.duality_gap = cert.plan_cost - cert.dual_value;
  return cert;
}

std::vector<TightPair> tight_set(const DualPotential& potential, const CostTable& table,
                                 const Marginals& marginals, double tol) {
  std::vector<TightPair> out;
  const auto& u = potential.u;
  for (NodeId x : marginals.support0()) {
    if (!table.has_row(x)) {
      throw Error(ErrorKind::kInvalidConfig,
                  "tight set needs a cost row for source " + std::to_string(x));
    }
    const auto row = table.row(x);
    const double ux = u[static_cast<std::size_t>(x)];
    for (NodeId y : marginals.support1()) {
      const double c = row[static_cast<std::size_t>(y)];
      if (std::abs(c - (u[static_cast<std::size_t>(y)] - ux)) <= tol) out.push_back({x, y, c});
    }
  }
  return out;
}

double default_tight_tolerance(std::span<const EdgeCost> edge_costs) {
  double max_w = 0.0;
  for (const EdgeCost& e : edge_costs) max_w = std::max(max_w, e.weight);
  return 1e-9 * (1.0 + max_w);
}

}  // namespace monge
