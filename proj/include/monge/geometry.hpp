#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace monge {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  Vec2 displacement = Vec2::Zero();
  double length = 0.0;  // Euclidean length of the displacement
};

enum class Topology { kTorus2d, kGeneralGraph };

struct GraphSpec;

// Neighbourhood used on the periodic grid. The 16-point stencil adds the
// knight moves (±1,±2), (±2,±1) to the 8-point king moves.
enum class Stencil { k8 = 8, k16 = 16 };

// A finite, strongly connected digraph standing in for a compact manifold.
// Nodes carry positions in the plane, edges carry displacement vectors (on the
// torus, the minimal periodic wrap). Immutable once built.
class DiscreteManifold {
 public:
  std::size_t node_count() const { return positions_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Vec2>& positions() const { return positions_; }
  const Vec2& position(NodeId x) const { return positions_[static_cast<std::size_t>(x)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

  // Edge ids leaving / entering a node, in increasing id order.
  std::span<const EdgeId> out_edges(NodeId x) const;
  std::span<const EdgeId> in_edges(NodeId x) const;

  Topology topology() const { return topology_; }
  // Torus metadata; side_count() and spacing() are 0 on general graphs.
  int side_count() const { return side_count_; }
  double spacing() const { return spacing_; }
  Stencil stencil() const { return stencil_; }

  // Area attributed to one node: h² on the torus, 1/n on general graphs.
  double cell_volume() const;

  std::string describe() const;

 private:
  friend DiscreteManifold build_torus_grid(int side_count, Stencil stencil);
  friend DiscreteManifold load_graph(const GraphSpec& spec);

  DiscreteManifold(std::vector<Vec2> positions, std::vector<Edge> edges, Topology topology);
  void index_edges();

  std::vector<Vec2> positions_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<EdgeId> out_ids_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_ids_;
  Topology topology_ = Topology::kGeneralGraph;
  int side_count_ = 0;
  double spacing_ = 0.0;
  Stencil stencil_ = Stencil::k16;
};

// Periodic grid on [0,1)² with spacing 1/side_count. Node (i,j) has id
// i + side_count·j. Throws invalid-config when side_count < 2.
DiscreteManifold build_torus_grid(int side_count, Stencil stencil = Stencil::k16);

// Structured description of a general graph.
struct GraphSpec {
  struct EdgeRecord {
    NodeId source = 0;
    NodeId target = 0;
    Vec2 displacement = Vec2::Zero();
  };
  std::vector<Vec2> positions;
  std::vector<EdgeRecord> edges;
};

// Validates and builds a general-graph manifold. Throws invalid-config for
// out-of-range endpoints, self-loops or duplicate (source, target) pairs and
// connectivity-error when the digraph is not strongly connected.
DiscreteManifold load_graph(const GraphSpec& spec);

// Line-oriented node/edge list:
//   node <id> <x> <y>
//   edge <source> <target> [<dx> <dy>]
// Node ids must be 0..n-1. A missing displacement defaults to the position
// difference. '#' starts a comment.
GraphSpec parse_graph_spec(std::istream& in);
GraphSpec read_graph_spec_file(const std::string& path);

bool is_strongly_connected(std::size_t node_count, std::span<const Edge> edges);

// Max Euclidean stencil offset in units of h: √2 for 8, √5 for 16.
double stencil_diameter(Stencil stencil);

enum class MetricKind { kEuclidean, kRiemannian, kRanders };

// Per-node Finsler norm ‖v‖ₓ = √(vᵀG(x)v) + ω(x)·v. The euclidean variant has
// G = I, ω = 0; riemannian has ω = 0.
class FinslerMetric {
 public:
  static FinslerMetric euclidean(std::size_t node_count);
  static FinslerMetric riemannian(std::vector<Mat2> g);
  static FinslerMetric randers(std::vector<Mat2> g, std::vector<Vec2> omega);

  MetricKind kind() const { return kind_; }
  std::size_t node_count() const { return g_.size(); }
  const Mat2& g(NodeId x) const { return g_[static_cast<std::size_t>(x)]; }
  const Vec2& omega(NodeId x) const { return omega_[static_cast<std::size_t>(x)]; }

  // ‖ω(x)‖ in the dual norm of G(x); the Randers condition requires < 1.
  double drift_norm(NodeId x) const { return drift_norm_[static_cast<std::size_t>(x)]; }

  // ‖v‖ₓ; throws metric-degenerate when the Randers condition fails at x.
  double eval(NodeId x, const Vec2& v) const;
  // Same formula without the Randers check (used by audits).
  double eval_unchecked(NodeId x, const Vec2& v) const;

  // ∂ᵥ‖v‖ₓ and ∂²ᵥ‖v‖ₓ for v ≠ 0.
  Vec2 gradient(NodeId x, const Vec2& v) const;
  Mat2 hessian(NodeId x, const Vec2& v) const;

  std::string describe() const;

 private:
  FinslerMetric(MetricKind kind, std::vector<Mat2> g, std::vector<Vec2> omega);

  MetricKind kind_;
  std::vector<Mat2> g_;
  std::vector<Vec2> omega_;
  std::vector<double> drift_norm_;
};

double metric_eval(const FinslerMetric& metric, NodeId x, const Vec2& v);

struct MetricAudit {
  std::size_t samples = 0;
  // max(0, -‖v‖ₓ) over Euclidean-unit samples, including the analytic
  // minimising direction -G⁻¹ω at each audited node.
  double max_positivity_violation = 0.0;
  // |‖λv‖ₓ - λ‖v‖ₓ| with |v| ≤ 1, λ ∈ [0.1, 10].
  double max_homogeneity_violation = 0.0;
  // max(0, ‖(v+w)/2‖ₓ - (‖v‖ₓ+‖w‖ₓ)/2).
  double max_convexity_violation = 0.0;
  // min over nodes of 1 - ‖ω‖, the smallest rate on the G-unit circle.
  double min_unit_rate = 1.0;
  bool positive = true;
  bool near_degenerate = false;
};

// min_unit_rate below this flags a metric as near-degenerate.
inline constexpr double kNearDegenerateRate = 0.05;

MetricAudit metric_audit(const FinslerMetric& metric, const DiscreteManifold& manifold,
                         std::size_t sample_count, std::uint64_t seed = 1);

}  // namespace monge
