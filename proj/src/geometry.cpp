#include "monge/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <queue>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "monge/error.hpp"

namespace monge {

namespace {

constexpr std::array<std::pair<int, int>, 8> kKingMoves = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
constexpr std::array<std::pair<int, int>, 8> kKnightMoves = {{
    {2, 1}, {-2, 1}, {2, -1}, {-2, -1}, {1, 2}, {-1, 2}, {1, -2}, {-1, -2}}};

int positive_mod(int a, int n) { return ((a % n) + n) % n; }

// Reduce a lattice offset to the minimal periodic representative. Offsets of
// exactly n/2 are kept as given so that both ±n/2 survive on tiny grids.
int minimal_wrap(int offset, int n) {
  int r = positive_mod(offset, n);
  if (2 * r > n) r -= n;
  if (2 * std::abs(offset) == n) return offset;
  return r;
}

std::vector<bool> reach(std::size_t n, std::span<const Edge> edges, bool forward) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const Edge& e : edges) {
    if (forward) {
      adj[static_cast<std::size_t>(e.source)].push_back(e.target);
    } else {
      adj[static_cast<std::size_t>(e.target)].push_back(e.source);
    }
  }
  std::vector<bool> seen(n, false);
  std::queue<NodeId> queue;
  seen[0] = true;
  queue.push(0);
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop();
    for (NodeId y : adj[static_cast<std::size_t>(x)]) {
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        queue.push(y);
      }
    }
  }
  return seen;
}

}  // namespace

DiscreteManifold::DiscreteManifold(std::vector<Vec2> positions, std::vector<Edge> edges,
                                   Topology topology)
    : positions_(std::move(positions)), edges_(std::move(edges)), topology_(topology) {
  index_edges();
}

void DiscreteManifold::index_edges() {
  const std::size_t n = positions_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++out_offsets_[static_cast<std::size_t>(e.source) + 1];
    ++in_offsets_[static_cast<std::size_t>(e.target) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_ids_.assign(edges_.size(), 0);
  in_ids_.assign(edges_.size(), 0);
  std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    out_ids_[out_fill[static_cast<std::size_t>(e.source)]++] = static_cast<EdgeId>(id);
    in_ids_[in_fill[static_cast<std::size_t>(e.target)]++] = static_cast<EdgeId>(id);
  }
}

std::span<const EdgeId> DiscreteManifold::out_edges(NodeId x) const {
  const auto i = static_cast<std::size_t>(x);
  return {out_ids_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
}

std::span<const EdgeId> DiscreteManifold::in_edges(NodeId x) const {
  const auto i = static_cast<std::size_t>(x);
  return {in_ids_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
}

double DiscreteManifold::cell_volume() const {
  if (topology_ == Topology::kTorus2d) return spacing_ * spacing_;
  return 1.0 / static_cast<double>(node_count());
}

std::string DiscreteManifold::describe() const {
  std::ostringstream out;
  if (topology_ == Topology::kTorus2d) {
    out << "torus2d(n=" << side_count_ << ",stencil=" << static_cast<int>(stencil_) << ")";
  } else {
    out << "graph(nodes=" << node_count() << ",edges=" << edge_count() << ")";
  }
  return out.str();
}

double stencil_diameter(Stencil stencil) {
  return stencil == Stencil::k8 ? std::sqrt(2.0) : std::sqrt(5.0);
}

DiscreteManifold build_torus_grid(int side_count, Stencil stencil) {
  if (side_count < 2) {
    throw Error(ErrorKind::kInvalidConfig, "torus side_count must be >= 2, got " +
                                               std::to_string(side_count));
  }
  const int n = side_count;
  const double h = 1.0 / n;
  std::vector<Vec2> positions;
  positions.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) positions.emplace_back(i * h, j * h);
  }

  std::vector<std::pair<int, int>> offsets(kKingMoves.begin(), kKingMoves.end());
  if (stencil == Stencil::k16) offsets.insert(offsets.end(), kKnightMoves.begin(), kKnightMoves.end());

  std::vector<Edge> edges;
  edges.reserve(positions.size() * offsets.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const NodeId source = i + n * j;
      std::set<std::pair<NodeId, std::pair<int, int>>> seen;
      for (auto [di, dj] : offsets) {
        const int wi = minimal_wrap(di, n);
        const int wj = minimal_wrap(dj, n);
        const NodeId target = positive_mod(i + wi, n) + n * positive_mod(j + wj, n);
        if (target == source) continue;
        if (!seen.insert({target, {wi, wj}}).second) continue;
        Edge e;
        e.source = source;
        e.target = target;
        e.displacement = Vec2(wi * h, wj * h);
        e.length = e.displacement.norm();
        edges.push_back(e);
      }
    }
  }
  DiscreteManifold m(std::move(positions), std::move(edges), Topology::kTorus2d);
  m.side_count_ = n;
  m.spacing_ = h;
  m.stencil_ = stencil;
  return m;
}

bool is_strongly_connected(std::size_t node_count, std::span<const Edge> edges) {
  if (node_count == 0) return false;
  const auto fwd = reach(node_count, edges, true);
  const auto bwd = reach(node_count, edges, false);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

DiscreteManifold load_graph(const GraphSpec& spec) {
  const std::size_t n = spec.positions.size();
  if (n == 0) throw Error(ErrorKind::kInvalidConfig, "graph has no nodes");
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<Edge> edges;
  edges.reserve(spec.edges.size());
  for (const auto& record : spec.edges) {
    if (record.source < 0 || record.target < 0 || static_cast<std::size_t>(record.source) >= n ||
        static_cast<std::size_t>(record.target) >= n) {
      throw Error(ErrorKind::kInvalidConfig, "edge endpoint out of range");
    }
    if (record.source == record.target) {
      throw Error(ErrorKind::kInvalidConfig,
                  "self-loop at node " + std::to_string(record.source));
    }
    if (!seen.insert({record.source, record.target}).second) {
      throw Error(ErrorKind::kInvalidConfig, "duplicate edge " + std::to_string(record.source) +
                                                 "->" + std::to_string(record.target));
    }
    Edge e;
    e.source = record.source;
    e.target = record.target;
    e.displacement = record.displacement;
    e.length = record.displacement.norm();
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw Error(ErrorKind::kInvalidConfig, "edge displacement must be nonzero and finite");
    }
    edges.push_back(e);
  }
  if (n > 1 && !is_strongly_connected(n, edges)) {
    throw Error(ErrorKind::kConnectivity, "graph is not strongly connected");
  }
  return DiscreteManifold(spec.positions, std::move(edges), Topology::kGeneralGraph);
}

GraphSpec parse_graph_spec(std::istream& in) {
  struct RawEdge {
    NodeId source, target;
    bool has_displacement;
    Vec2 displacement;
  };
  std::vector<std::pair<NodeId, Vec2>> nodes;
  std::vector<RawEdge> raw_edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    auto fail = [&] {
      throw Error(ErrorKind::kInvalidConfig, "graph spec line " + std::to_string(line_no) +
                                                 ": malformed record");
    };
    if (tag == "node") {
      NodeId id;
      double x, y;
      if (!(fields >> id >> x >> y)) fail();
      nodes.emplace_back(id, Vec2(x, y));
    } else if (tag == "edge") {
      RawEdge e{};
      if (!(fields >> e.source >> e.target)) fail();
      double dx, dy;
      if (fields >> dx) {
        if (!(fields >> dy)) fail();
        e.has_displacement = true;
        e.displacement = Vec2(dx, dy);
      }
      raw_edges.push_back(e);
    } else {
      fail();
    }
  }
  GraphSpec spec;
  spec.positions.assign(nodes.size(), Vec2::Zero());
  std::vector<bool> filled(nodes.size(), false);
  for (const auto& [id, pos] : nodes) {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size() || filled[static_cast<std::size_t>(id)]) {
      throw Error(ErrorKind::kInvalidConfig, "node ids must be a permutation of 0..n-1");
    }
    filled[static_cast<std::size_t>(id)] = true;
    spec.positions[static_cast<std::size_t>(id)] = pos;
  }
  for (const RawEdge& e : raw_edges) {
    GraphSpec::EdgeRecord record;
    record.source = e.source;
    record.target = e.target;
    if (e.has_displacement) {
      record.displacement = e.displacement;
    } else {
      if (e.source < 0 || e.target < 0 || static_cast<std::size_t>(e.source) >= nodes.size() ||
          static_cast<std::size_t>(e.target) >= nodes.size()) {
        throw Error(ErrorKind::kInvalidConfig, "edge endpoint out of range");
      }
      record.displacement = spec.positions[static_cast<std::size_t>(e.target)] -
                            spec.positions[static_cast<std::size_t>(e.source)];
    }
    spec.edges.push_back(record);
  }
  return spec;
}

GraphSpec read_graph_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open graph file '" + path + "'");
  return parse_graph_spec(in);
}

// ---------------------------------------------------------------------------
// FinslerMetric

FinslerMetric::FinslerMetric(MetricKind kind, std::vector<Mat2> g, std::vector<Vec2> omega)
    : kind_(kind), g_(std::move(g)), omega_(std::move(omega)) {
  if (g_.size() != omega_.size()) {
    throw Error(ErrorKind::kInvalidConfig, "metric fields have mismatched sizes");
  }
  drift_norm_.resize(g_.size());
  for (std::size_t i = 0; i < g_.size(); ++i) {
    const Mat2& gi = g_[i];
    if (std::abs(gi(0, 1) - gi(1, 0)) > 1e-12 * (1.0 + gi.norm())) {
      throw Error(ErrorKind::kInvalidConfig, "metric tensor must be symmetric");
    }
    Eigen::LLT<Mat2> llt(gi);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::kInvalidConfig, "metric tensor must be positive definite at node " +
                                                 std::to_string(i));
    }
    drift_norm_[i] = std::sqrt(std::max(0.0, omega_[i].dot(llt.solve(omega_[i]))));
  }
}

FinslerMetric FinslerMetric::euclidean(std::size_t node_count) {
  return FinslerMetric(MetricKind::kEuclidean, std::vector<Mat2>(node_count, Mat2::Identity()),
                       std::vector<Vec2>(node_count, Vec2::Zero()));
}

FinslerMetric FinslerMetric::riemannian(std::vector<Mat2> g) {
  std::vector<Vec2> omega(g.size(), Vec2::Zero());
  return FinslerMetric(MetricKind::kRiemannian, std::move(g), std::move(omega));
}

FinslerMetric FinslerMetric::randers(std::vector<Mat2> g, std::vector<Vec2> omega) {
  return FinslerMetric(MetricKind::kRanders, std::move(g), std::move(omega));
}

double FinslerMetric::eval_unchecked(NodeId x, const Vec2& v) const {
  const auto i = static_cast<std::size_t>(x);
  if (kind_ == MetricKind::kEuclidean) return v.norm();
  const double quad = std::sqrt(std::max(0.0, v.dot(g_[i] * v)));
  return quad + omega_[i].dot(v);
}

double FinslerMetric::eval(NodeId x, const Vec2& v) const {
  if (drift_norm(x) >= 1.0) {
    throw Error(ErrorKind::kMetricDegenerate,
                "Randers condition violated at node " + std::to_string(x) +
                    " (drift norm " + std::to_string(drift_norm(x)) + ")");
  }
  return eval_unchecked(x, v);
}

Vec2 FinslerMetric::gradient(NodeId x, const Vec2& v) const {
  const auto i = static_cast<std::size_t>(x);
  const Vec2 gv = g_[i] * v;
  const double s = std::sqrt(v.dot(gv));
  return gv / s + omega_[i];
}

Mat2 FinslerMetric::hessian(NodeId x, const Vec2& v) const {
  const auto i = static_cast<std::size_t>(x);
  const Vec2 gv = g_[i] * v;
  const double s = std::sqrt(v.dot(gv));
  return (g_[i] - gv * gv.transpose() / (s * s)) / s;
}

std::string FinslerMetric::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case MetricKind::kEuclidean: out << "euclidean"; break;
    case MetricKind::kRiemannian: out << "riemannian"; break;
    case MetricKind::kRanders: out << "randers"; break;
  }
  out << "[" << g_.size() << "]";
  if (kind_ != MetricKind::kEuclidean) {
    for (std::size_t i = 0; i < g_.size(); ++i) {
      out << ";" << g_[i](0, 0) << "," << g_[i](0, 1) << "," << g_[i](1, 1) << "," << omega_[i](0)
          << "," << omega_[i](1);
    }
  }
  return out.str();
}

double metric_eval(const FinslerMetric& metric, NodeId x, const Vec2& v) {
  return metric.eval(x, v);
}

MetricAudit metric_audit(const FinslerMetric& metric, const DiscreteManifold& manifold,
                         std::size_t sample_count, std::uint64_t seed) {
  MetricAudit audit;
  const std::size_t n = manifold.node_count();
  if (n == 0 || metric.node_count() != n) return audit;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));

  for (std::size_t i = 0; i < n; ++i) {
    audit.min_unit_rate = std::min(audit.min_unit_rate, 1.0 - metric.drift_norm(static_cast<NodeId>(i)));
  }

  auto unit = [&] {
    const double a = angle(rng);
    return Vec2(std::cos(a), std::sin(a));
  };
  for (std::size_t s = 0; s < sample_count; ++s) {
    const auto x = static_cast<NodeId>(pick_node(rng));
    const Vec2 e = unit();
    audit.max_positivity_violation =
        std::max(audit.max_positivity_violation, -metric.eval_unchecked(x, e));

    // Worst direction for positivity: v ∝ -G⁻¹ω.
    const Vec2& w = metric.omega(x);
    if (w.norm() > 0.0) {
      Vec2 worst = -metric.g(x).ldlt().solve(w);
      worst /= worst.norm();
      audit.max_positivity_violation =
          std::max(audit.max_positivity_violation, -metric.eval_unchecked(x, worst));
    }

    const Vec2 v = e * radius(rng);
    const double lambda = std::exp(log_scale(rng));
    audit.max_homogeneity_violation =
        std::max(audit.max_homogeneity_violation,
                 std::abs(metric.eval_unchecked(x, lambda * v) - lambda * metric.eval_unchecked(x, v)));

    const Vec2 u = unit() * radius(rng);
    const double mid = metric.eval_unchecked(x, 0.5 * (u + v));
    const double avg = 0.5 * (metric.eval_unchecked(x, u) + metric.eval_unchecked(x, v));
    audit.max_convexity_violation = std::max(audit.max_convexity_violation, mid - avg);
    ++audit.samples;
  }
  audit.max_positivity_violation = std::max(0.0, audit.max_positivity_violation);
  audit.max_convexity_violation = std::max(0.0, audit.max_convexity_violation);
  audit.positive = audit.max_positivity_violation == 0.0 && audit.min_unit_rate > 0.0;
  audit.near_degenerate = audit.min_unit_rate < kNearDegenerateRate;
  return audit;
}

}  // namespace monge
