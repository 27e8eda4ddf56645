#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "monge/geometry.hpp"
#include "monge/lagrangian.hpp"

namespace monge {

// Optimal single-edge action. weight is in action units, time in time units.
struct EdgeCost {
  EdgeId edge = 0;
  double weight = 0.0;
  double time = 0.0;
  // |E(x, d/t*) − k| at the computed optimum.
  double energy_residual = 0.0;
  // The action was still decreasing at the largest admissible time; weight is
  // the value there, not an attained minimum.
  bool boundary = false;
};

// Where the distance-like cost comes from: a Finsler metric (unit-speed edge
// traversal) or a Tonelli Lagrangian with its shift k.
class CostModel {
 public:
  static CostModel finsler(FinslerMetric metric);
  static CostModel lagrangian(Lagrangian lagrangian);

  bool is_finsler() const { return std::holds_alternative<FinslerMetric>(source_); }
  const FinslerMetric& metric() const { return std::get<FinslerMetric>(source_); }
  const Lagrangian& lagrangian() const { return std::get<Lagrangian>(source_); }

  // Positive lower bound δ of the action rate. For a Finsler metric this is
  // the floor of (1 + ‖v‖²)/2, i.e. ½.
  double delta() const;

  std::string describe() const;
  std::string digest() const;

 private:
  explicit CostModel(std::variant<FinslerMetric, Lagrangian> source) : source_(std::move(source)) {}
  std::variant<FinslerMetric, Lagrangian> source_;
};

struct ActionSolverOptions {
  // Relative tolerance on the minimising time.
  double relative_tolerance = 1e-12;
  // Speed range defining the admissible times t ∈ [|d|/max_speed, |d|/min_speed].
  double max_speed = 1e6;
  double min_speed = 1e-6;
};

// Action of traversing displacement d from x in time t: t·(L(x, d/t) + k).
double edge_action(const Lagrangian& lagrangian, NodeId x, const Vec2& d, double t);

enum class ActionStatus { kRegular, kBoundary, kSubcritical };

struct ActionProbe {
  ActionStatus status = ActionStatus::kRegular;
  double time = 0.0;   // minimiser, or the largest admissible time
  double value = 0.0;  // action at `time`
  double energy_residual = 0.0;
};

// Minimises t ↦ t·(L(x, d/t) + k) by geometric bracketing, golden-section
// narrowing and a safeguarded Newton polish on the derivative k − E(x, d/t).
// Never throws on subcriticality; reports it in the status.
ActionProbe probe_edge_action(const Lagrangian& lagrangian, NodeId x, const Vec2& d,
                              const ActionSolverOptions& options = {});

EdgeCost edge_weight_finsler(const DiscreteManifold& manifold, const FinslerMetric& metric,
                             EdgeId edge);

// Throws subcritical-error when the action decreases without bound along the
// edge ray. A boundary case (action → 0⁺ as t → ∞) is returned flagged.
EdgeCost edge_weight_lagrangian(const DiscreteManifold& manifold, const Lagrangian& lagrangian,
                                EdgeId edge, const ActionSolverOptions& options = {});

// All edge costs for a model. Throws supercriticality-violated when any edge
// is subcritical, boundary, or has a nonpositive weight.
std::vector<EdgeCost> compute_edge_costs(const DiscreteManifold& manifold, const CostModel& model,
                                         const ActionSolverOptions& options = {});

// Edge costs from explicit positive weights (time = weight).
std::vector<EdgeCost> explicit_edge_costs(std::span<const double> weights);

// Single-source Mañé potential c(source, ·).
struct CostField {
  NodeId source = 0;
  std::vector<double> values;
  std::string model_digest;
};

// Dijkstra over the edge weights; ties are settled by lowest node index.
// Throws supercriticality-violated if any weight is nonpositive.
CostField mane_row(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                   NodeId source);

// Largest node count for which the full n×n matrix is materialised.
inline constexpr std::size_t kMaxDenseNodes = 2048;

// Rows c(x, ·) for a chosen set of sources.
class CostTable {
 public:
  CostTable() = default;
  // Dense table from an explicit matrix (rows = sources, all nodes).
  static CostTable from_matrix(const std::vector<std::vector<double>>& matrix);

  std::size_t node_count() const { return node_count_; }
  bool has_row(NodeId x) const;
  std::span<const double> row(NodeId x) const;
  double at(NodeId x, NodeId y) const { return row(x)[static_cast<std::size_t>(y)]; }
  std::vector<NodeId> sources() const;
  const std::string& model_digest() const { return model_digest_; }

 private:
  friend CostTable cost_rows(const DiscreteManifold&, std::span<const EdgeCost>,
                             std::span<const NodeId>, int, const std::string&);
  std::size_t node_count_ = 0;
  std::vector<std::int32_t> row_index_;  // node -> slot or -1
  std::vector<double> data_;
  std::string model_digest_;
};

// Rows for the given sources, computed in parallel.
CostTable cost_rows(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                    std::span<const NodeId> sources, int threads = 0,
                    const std::string& model_digest = {});

// Every row; throws size-error above kMaxDenseNodes.
CostTable all_pair_costs(const DiscreteManifold& manifold, std::span<const EdgeCost> edge_costs,
                         int threads = 0, const std::string& model_digest = {});

struct MetricCertification {
  std::size_t triples = 0;
  double max_triangle_violation = 0.0;  // max c(x,z) − c(x,y) − c(y,z)
  double max_diagonal = 0.0;            // max |c(x,x)|
  double min_pair_sum = 0.0;            // min c(x,y) + c(y,x), x ≠ y
};

// Samples triples among nodes whose rows are present (x, y need rows; z free).
MetricCertification certify_metric_axioms(const CostTable& table, std::size_t triple_sample_count,
                                          std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Critical value

struct WeightedArc {
  NodeId from = 0;
  NodeId to = 0;
  double weight = 0.0;
};

// Finds a cycle of total weight ≤ 0 by label-correcting relaxation from a
// virtual root (vertex-count cutoff), then, if none is negative, searches the
// zero-reduced-cost subgraph for a zero cycle. Returns arc indices in cycle
// order, or nullopt.
std::optional<std::vector<std::size_t>> find_nonpositive_cycle(std::size_t node_count,
                                                               std::span<const WeightedArc> arcs);

// Evidence that L + k is not supercritical at `shift`: a closed walk whose
// action, with each edge traversed in the listed time, is ≤ 0. A single edge
// whose rest-point rate L(x,0) + k is negative is recorded too.
struct LowerCertificate {
  double shift = 0.0;
  std::vector<EdgeId> cycle;
  std::vector<double> times;
  double cycle_action = 0.0;
  std::optional<EdgeId> subcritical_edge;
};

// Evidence that L + k is supercritical at `shift`: every edge has an attained
// positive optimal action (so every cycle is positive).
struct UpperCertificate {
  double shift = 0.0;
  double min_edge_weight = 0.0;
  EdgeId argmin_edge = 0;
};

struct CriticalValue {
  double k_lo = 0.0;
  double k_hi = 0.0;
  double estimate = 0.0;
  std::size_t iterations = 0;
  LowerCertificate lower;
  UpperCertificate upper;
};

// Bisection on k. Throws bracket-error if [k_lo, k_hi] does not straddle k₀.
CriticalValue critical_value(const DiscreteManifold& manifold, const Lagrangian& family,
                             double k_lo, double k_hi, double tolerance,
                             const ActionSolverOptions& options = {});

// Independent re-checks of the certificates by direct action evaluation.
bool verify_lower_certificate(const DiscreteManifold& manifold, const Lagrangian& family,
                              const LowerCertificate& certificate);
bool verify_upper_certificate(const DiscreteManifold& manifold, const Lagrangian& family,
                              const UpperCertificate& certificate,
                              const ActionSolverOptions& options = {});

}  // namespace monge
