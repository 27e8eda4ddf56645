#include "monge/cost_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "monge/digest.hpp"
#include "monge/error.hpp"
#include "monge/parallel.hpp"

namespace monge {

CostModel CostModel::finsler(FinslerMetric metric) { return CostModel(std::move(metric)); }

CostModel CostModel::lagrangian(Lagrangian lagrangian) { return CostModel(std::move(lagrangian)); }

double CostModel::delta() const {
  if (is_finsler()) return 0.5;
  return lagrangian().positivity_floor();
}

std::string CostModel::describe() const {
  if (is_finsler()) return "finsler{" + metric().describe() + "}";
  return "lagrangian{" + lagrangian().describe() + "}";
}

std::string CostModel::digest() const { return short_digest(describe()); }

double edge_action(const Lagrangian& lagrangian, NodeId x, const Vec2& d, double t) {
  return t * (lagrangian.value(x, d / t) + lagrangian.shift());
}

ActionProbe probe_edge_action(const Lagrangian& lagrangian, NodeId x, const Vec2& d,
                              const ActionSolverOptions& options) {
  const double k = lagrangian.shift();
  const double len = d.norm();
  const double t_min = len / options.max_speed;
  const double t_max = len / options.min_speed;
  auto f = [&](double t) { return edge_action(lagrangian, x, d, t); };
  // f'(t) = L + k − ∂ᵥL·v = k − E(x, d/t); f''(t) = dᵀ∂²ᵥL d / t³.
  auto slope = [&](double t) { return k - lagrangian.energy(x, d / t); };
  auto curvature = [&](double t) { return lagrangian.hessian_form(x, d / t, d) / (t * t * t); };

  ActionProbe probe;
  double lo = std::clamp(len, t_min, t_max);
  double hi = lo;
  if (slope(lo) < 0.0) {
    while (slope(hi) < 0.0) {
      if (hi >= t_max) {
        probe.time = t_max;
        probe.value = f(t_max);
        probe.energy_residual = std::abs(slope(t_max));
        const double rest_rate = lagrangian.value(x, Vec2::Zero()) + k;
        probe.status = (rest_rate < 0.0 || probe.value <= 0.0) ? ActionStatus::kSubcritical
                                                                : ActionStatus::kBoundary;
        return probe;
      }
      lo = hi;
      hi = std::min(2.0 * hi, t_max);
    }
  } else {
    while (slope(lo) >= 0.0 && lo > t_min) {
      hi = lo;
      lo = std::max(0.5 * lo, t_min);
    }
  }

  // Golden-section narrowing of [lo, hi] on f.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = f(c);
  double fe = f(e);
  for (int it = 0; it < 200 && (b - a) > 1e-3 * b; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f(e);
    }
  }

  // Safeguarded Newton on f' = 0 inside [a, b].
  double t = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double s = slope(t);
    if (s == 0.0) break;
    if (s < 0.0) {
      a = t;
    } else {
      b = t;
    }
    double next = t - s / curvature(t);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const bool converged = std::abs(next - t) <= options.relative_tolerance * t;
    t = next;
    if (converged) break;
  }
  probe.status = ActionStatus::kRegular;
  probe.time = t;
  probe.value = f(t);
  probe.energy_residual = std::abs(slope(t));
  return probe;
}

EdgeCost edge_weight_finsler(const DiscreteManifold& manifold, const FinslerMetric& metric,
                             EdgeId edge) {
  const Edge& e = manifold.edge(edge);
  EdgeCost cost;
  cost.edge = edge;
  cost.weight = metric.eval(e.source, e.displacement);
  cost.time = cost.weight;
  cost.energy_residual = 0.0;
  return cost;
}

EdgeCost edge_weight_lagrangian(const DiscreteManifold& manifold, const Lagrangian& lagrangian,
                                EdgeId edge, const ActionSolverOptions& options) {
  const Edge& e = manifold.edge(edge);
  const ActionProbe probe = probe_edge_action(lagrangian, e.source, e.displacement, options);
  if (probe.status == ActionStatus::kSubcritical) {
    throw Error(ErrorKind::kSubcritical,
                "action along edge " + std::to_string(edge) + " is unbounded below at k = " +
                    std::to_string(lagrangian.shift()));
  }
  EdgeCost cost;
  cost.edge = edge;
  cost.weight = probe.value;
  cost.time = probe.time;
  cost.energy_residual = probe.energy_residual;
  cost.boundary = probe.status == ActionStatus::kBoundary;
  return cost;
}

std::vector<EdgeCost> compute_edge_costs(const DiscreteManifold& manifold, const CostModel& model,
                                         const ActionSolverOptions& options) {
  std::vector<EdgeCost> costs(manifold.edge_count());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto id = static_cast<EdgeId>(i);
    if (model.is_finsler()) {
      costs[i] = edge_weight_finsler(manifold, model.metric(), id);
    } else {
      try {
        costs[i] = edge_weight_lagrangian(manifold, model.lagrangian(), id, options);
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::kSubcritical) throw;
        throw Error(ErrorKind::kSupercriticalityViolated, err.what());
      }
    }
    if (costs[i].boundary || !(costs[i].weight > 0.0)) {
      throw Error(ErrorKind::kSupercriticalityViolated,
                  "edge " + std::to_string(i) + " has no positive attained action");
    }
  }
  return costs;
}

std::vector<EdgeCost> explicit_edge_costs(std::span<const double> weights) {
  std::vector<EdgeCost> costs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    costs[i].edge = static_cast<EdgeId>(i);
    costs[i].weight = weights[i];
    costs[i].time = weights[i];
  }
  return costs;
}

CostField mane_row(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                   NodeId source) {
  const std::size_t n = manifold.node_count();
  for (const EdgeCost& c : edge_costs) {
    if (!(c.weight > 0.0)) {
      throw Error(ErrorKind::kSupercriticalityViolated,
                  "nonpositive weight on edge " + std::to_string(c.edge));
    }
  }
  CostField field;
  field.source = source;
  field.values.assign(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  field.values[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  std::vector<bool> settled(n, false);
  while (!heap.empty()) {
    const auto [dist, x] = heap.top();
    heap.pop();
    if (settled[static_cast<std::size_t>(x)]) continue;
    settled[static_cast<std::size_t>(x)] = true;
    for (EdgeId id : manifold.out_edges(x)) {
      const Edge& e = manifold.edge(id);
      const double candidate = dist + edge_costs[static_cast<std::size_t>(id)].weight;
      double& best = field.values[static_cast<std::size_t>(e.target)];
      if (candidate < best) {
        best = candidate;
        heap.emplace(candidate, e.target);
      }
    }
  }
  return field;
}

CostTable CostTable::from_matrix(const std::vector<std::vector<double>>& matrix) {
  CostTable table;
  table.node_count_ = matrix.size();
  table.row_index_.assign(matrix.size(), -1);
  table.data_.reserve(matrix.size() * matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != matrix.size()) {
      throw Error(ErrorKind::kInvalidConfig, "cost matrix must be square");
    }
    table.row_index_[i] = static_cast<std::int32_t>(i);
    table.data_.insert(table.data_.end(), matrix[i].begin(), matrix[i].end());
  }
  return table;
}

bool CostTable::has_row(NodeId x) const {
  return x >= 0 && static_cast<std::size_t>(x) < row_index_.size() &&
         row_index_[static_cast<std::size_t>(x)] >= 0;
}

std::span<const double> CostTable::row(NodeId x) const {
  if (!has_row(x)) {
    throw Error(ErrorKind::kInvalidConfig, "cost row for node " + std::to_string(x) +
                                               " was not computed");
  }
  const auto slot = static_cast<std::size_t>(row_index_[static_cast<std::size_t>(x)]);
  return {data_.data() + slot * node_count_, node_count_};
}

std::vector<NodeId> CostTable::sources() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < row_index_.size(); ++i) {
    if (row_index_[i] >= 0) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

CostTable cost_rows(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                    std::span<const NodeId> sources, int threads,
                    const std::string& model_digest) {
  CostTable table;
  const std::size_t n = manifold.node_count();
  table.node_count_ = n;
  table.model_digest_ = model_digest;
  table.row_index_.assign(n, -1);
  std::vector<NodeId> unique;
  for (NodeId s : sources) {
    if (table.row_index_[static_cast<std::size_t>(s)] < 0) {
      table.row_index_[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(unique.size());
      unique.push_back(s);
    }
  }
  table.data_.assign(unique.size() * n, 0.0);
  parallel_for(unique.size(), threads, [&](std::size_t slot) {
    const CostField field = mane_row(manifold, edge_costs, unique[slot]);
    std::copy(field.values.begin(), field.values.end(), table.data_.begin() + slot * n);
  });
  return table;
}

CostTable all_pair_costs(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                         int threads, const std::string& model_digest) {
  const std::size_t n = manifold.node_count();
  if (n > kMaxDenseNodes) {
    throw Error(ErrorKind::kSize, "dense cost matrix limited to " +
                                      std::to_string(kMaxDenseNodes) + " nodes");
  }
  std::vector<NodeId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<NodeId>(i);
  return cost_rows(manifold, edge_costs, all, threads, model_digest);
}

MetricCertification certify_metric_axioms(const CostTable& table, std::size_t triple_sample_count,
                                          std::uint64_t seed) {
  MetricCertification cert;
  const auto sources = table.sources();
  const std::size_t n = table.node_count();
  for (NodeId x : sources) cert.max_diagonal = std::max(cert.max_diagonal, std::abs(table.at(x, x)));
  if (sources.empty()) return cert;

  cert.max_triangle_violation = -std::numeric_limits<double>::infinity();
  cert.min_pair_sum = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_source(0, sources.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_any(0, n - 1);
  for (std::size_t s = 0; s < triple_sample_count; ++s) {
    const NodeId x = sources[pick_source(rng)];
    const NodeId y = sources[pick_source(rng)];
    const auto z = static_cast<NodeId>(pick_any(rng));
    cert.max_triangle_violation =
        std::max(cert.max_triangle_violation, table.at(x, z) - table.at(x, y) - table.at(y, z));
    if (x != y) cert.min_pair_sum = std::min(cert.min_pair_sum, table.at(x, y) + table.at(y, x));
    ++cert.triples;
  }
  cert.max_triangle_violation = std::max(0.0, cert.max_triangle_violation);
  return cert;
}

}  // namespace monge
