#pragma once

#include <span>
#include <vector>

#include "monge/cost_engine.hpp"
#include "monge/ot_solver.hpp"

namespace monge {

// Edges along which u gains the full edge action, u(y) − u(x) ≥ w − tol_cal.
struct CalibratedGraph {
  std::size_t node_count = 0;
  std::vector<EdgeId> edges;       // manifold edge ids, increasing
  std::vector<NodeId> from, to;    // per calibrated edge
  std::vector<double> time;        // t* per calibrated edge
  std::vector<double> gain;        // u(y) − u(x) per calibrated edge
  std::vector<std::vector<std::size_t>> out, in;  // calibrated edge indices
  std::vector<NodeId> topological_order;
};

// Throws tolerance-error if the selected edges contain a directed cycle.
CalibratedGraph calibrated_edges(const DiscreteManifold& manifold,
                                 std::span<const EdgeCost> edge_costs,
                                 const DualPotential& potential, double tol_cal);

struct AlphaBeta {
  std::vector<double> alpha;  // longest calibrated time into each node
  std::vector<double> beta;   // longest calibrated time out of each node
};

AlphaBeta alpha_beta(const CalibratedGraph& graph);

struct RayClasses {
  std::vector<NodeId> transport;  // T: α + β > 0
  std::vector<NodeId> interior;   // T_ε: α > ε and β > ε
  std::vector<NodeId> ends;       // T − T₀
};

RayClasses classify(const AlphaBeta& ab, double epsilon);

// Inextensible source-to-sink node sequences covering every calibrated edge.
// Each uncovered edge, in topological order of its tail, is extended backward
// through the in-edge maximising α(p) + t and forward through the out-edge
// maximising t + β(q); ties go to the lowest node index.
std::vector<std::vector<NodeId>> maximal_chains(const CalibratedGraph& graph,
                                                const AlphaBeta& ab);

bool calibrated_path_exists(const CalibratedGraph& graph, NodeId x, NodeId y);

struct RayAudit {
  std::size_t calibrated_edges = 0;
  double min_speed_ratio = 0.0;  // min (u(y) − u(x)) / t*
  std::size_t speed_violations = 0;  // ratio < δ − 1e−9
  std::size_t order_pairs = 0;        // support pairs compared on common chains
  std::size_t order_violations = 0;
  std::size_t chains = 0;
  std::size_t max_lambda_per_chain = 0;
  std::size_t chains_with_lambda = 0;
  std::size_t unjoined_support_pairs = 0;  // x ≠ y without a calibrated path
};

RayAudit ray_audits(const CalibratedGraph& graph, std::span<const std::vector<NodeId>> chains,
                    const TransportPlan& plan, std::span<const NodeId> lambda, double delta);

}  // namespace monge
