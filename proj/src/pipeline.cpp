#include "monge/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "monge/error.hpp"

namespace monge {

TightScan tight_set_batched(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                            const Marginals& marginals, const PrimarySolution& primary, double tol,
                            int threads, std::size_t max_entries) {
  const std::size_t n = manifold.node_count();
  const auto& sources = marginals.support0();
  const std::size_t batch = std::max<std::size_t>(1, max_entries / std::max<std::size_t>(1, n));

  TightScan scan;
  std::vector<PlanEntry> entries = primary.plan.entries;  // sorted by source
  std::size_t next_entry = 0;
  for (std::size_t begin = 0; begin < sources.size(); begin += batch) {
    const std::size_t end = std::min(sources.size(), begin + batch);
    std::span<const NodeId> rows(sources.data() + begin, end - begin);
    const CostTable table = cost_rows(manifold, edge_costs, rows, threads);

    TransportPlan part;
    while (next_entry < entries.size() && entries[next_entry].source <= rows.back()) {
      part.entries.push_back(entries[next_entry++]);
    }
    const OptimalityCertificate c =
        certify_optimality(part, primary.potential, table, rows.size() * n);
    scan.certificate.pairs_checked += c.pairs_checked;
    scan.certificate.max_feasibility_violation =
        std::max(scan.certificate.max_feasibility_violation, c.max_feasibility_violation);
    scan.certificate.max_slackness_residual =
        std::max(scan.certificate.max_slackness_residual, c.max_slackness_residual);
    scan.certificate.plan_cost += c.plan_cost;

    for (NodeId x : rows) {
      const auto r = table.row(x);
      const double ux = primary.potential.u[static_cast<std::size_t>(x)];
      for (NodeId y : marginals.support1()) {
        const double cost = r[static_cast<std::size_t>(y)];
        if (std::abs(cost - (primary.potential.u[static_cast<std::size_t>(y)] - ux)) <= tol) {
          scan.tight.push_back({x, y, cost});
        }
      }
    }
  }
  if (next_entry != entries.size()) {
    throw Error(ErrorKind::kMarginal, "plan has sources outside supp mu0");
  }
  for (std::size_t v = 0; v < n; ++v) {
    scan.certificate.dual_value +=
        primary.potential.u[v] * (marginals.mu1()[v] - marginals.mu0()[v]);
  }
  scan.certificate.duality_gap = scan.certificate.plan_cost - scan.certificate.dual_value;
  return scan;
}

PipelineResult run_pipeline(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                            double delta, const Marginals& marginals,
                            const PipelineOptions& options) {
  PipelineResult out;
  out.delta = delta;
  out.tol_tight = options.tol_tight > 0.0 ? options.tol_tight : default_tight_tolerance(edge_costs);
  out.tol_cal = options.tol_cal > 0.0 ? options.tol_cal : 2.0 * out.tol_tight;

  out.primary = solve_primary(manifold, edge_costs, marginals);
  TightScan scan = tight_set_batched(manifold, edge_costs, marginals, out.primary, out.tol_tight,
                                     options.threads);
  out.certificate = scan.certificate;
  out.tight = std::move(scan.tight);

  out.selection = solve_secondary(out.tight, marginals);
  out.selection_primary_gap = std::abs(out.selection.plan.primary_cost - out.primary.optimal_value);

  std::vector<std::vector<NodeId>> chains;
  if (options.rays) {
    RayOutputs rays;
    rays.graph = calibrated_edges(manifold, edge_costs, out.primary.potential, out.tol_cal);
    rays.times = alpha_beta(rays.graph);
    rays.classes = classify(rays.times, options.epsilon);
    rays.chains = maximal_chains(rays.graph, rays.times);
    rays.audit = ray_audits(rays.graph, rays.chains, out.selection.plan, out.selection.lambda, delta);
    out.rays = std::move(rays);
  }
  out.monotonicity = monotonicity_check(
      out.selection.plan, out.tight, out.primary.potential, options.quadruple_samples,
      options.seed, out.rays ? std::span<const std::vector<NodeId>>(out.rays->chains)
                             : std::span<const std::vector<NodeId>>());
  return out;
}

TinySolution solve_tiny_instance(const TinyInstance& instance, const PipelineOptions& options) {
  if (!instance.backing) {
    throw Error(ErrorKind::kInvalidConfig, "tiny instance has no graph to solve on");
  }
  const GraphBacking& g = *instance.backing;
  const std::size_t nodes = g.manifold->node_count();
  const double atom = 1.0 / instance.n;
  std::vector<double> mu0(nodes, 0.0), mu1(nodes, 0.0);
  std::vector<int> source_index(nodes, -1), target_index(nodes, -1);
  for (int i = 0; i < instance.n; ++i) {
    mu0[static_cast<std::size_t>(g.sources[i])] = atom;
    source_index[static_cast<std::size_t>(g.sources[i])] = i;
    mu1[static_cast<std::size_t>(g.targets[i])] = atom;
    target_index[static_cast<std::size_t>(g.targets[i])] = i;
  }
  PipelineOptions opts = options;
  opts.rays = false;
  const PipelineResult r = run_pipeline(*g.manifold, g.edge_costs, 0.5, Marginals(mu0, mu1), opts);

  TinySolution s;
  s.primary = r.selection.plan.primary_cost;
  s.secondary = r.selection.secondary_cost;
  for (const PlanEntry& e : r.selection.plan.entries) {
    s.support.emplace_back(source_index[static_cast<std::size_t>(e.source)],
                           target_index[static_cast<std::size_t>(e.target)]);
  }
  return s;
}

}  // namespace monge
