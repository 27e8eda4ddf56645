#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monge/cost_engine.hpp"
#include "monge/geometry.hpp"

namespace monge {

// Largest n the permutation enumeration accepts.
inline constexpr int kMaxOracleSize = 8;

enum class OracleMode { kSyntheticMetric, kSlicedFromCostField };

// The graph a tiny instance was cut from, so the full pipeline can be rerun
// on it. Source i sits at node sources[i], target j at node targets[j].
struct GraphBacking {
  std::shared_ptr<const DiscreteManifold> manifold;
  std::vector<EdgeCost> edge_costs;
  std::vector<NodeId> sources;
  std::vector<NodeId> targets;
};

// n sources and n targets of mass 1/n each, cost c[i][j].
struct TinyInstance {
  int n = 0;
  std::vector<std::vector<double>> cost;
  std::optional<GraphBacking> backing;

  double sigma(int i, int j) const { return cost[i][j] * cost[i][j]; }
};

struct BruteResult {
  std::vector<int> permutation;  // i -> permutation[i]
  double primary = 0.0;          // Σ c over the permutation (unscaled)
  double secondary = 0.0;        // Σ σ
  bool unique = true;
  // Smallest lexicographic separation to any other permutation: its primary
  // excess if that exceeds 1e−9, otherwise its secondary excess.
  double runner_up_gap = 0.0;
};

// Exhaustive search over n! permutations: minimal Σc, then Σσ (both compared
// with 1e−9 slack), then lexicographic order. Throws size-error above 8.
BruteResult brute_lexicographic(const TinyInstance& instance);

// Deterministic from seed. Synthetic mode: shortest-path distances of a
// random positive-weight digraph on 2n nodes between random source and target
// node sets. Sliced mode: rows of a small Randers torus cost table.
TinyInstance random_instance(std::uint64_t seed, int n, OracleMode mode);

// What the two-stage solver returned, in mass-weighted units.
struct TinySolution {
  double primary = 0.0;
  double secondary = 0.0;
  std::vector<std::pair<int, int>> support;  // (source index, target index)
};

struct OracleVerdict {
  bool pass = false;
  double primary_error = 0.0;
  double secondary_error = 0.0;
  bool support_compared = false;
  bool support_match = true;
  std::string message;
};

// Scales the solver values by n, compares within 1e−9 and, when the oracle
// optimum is unique, compares supports.
OracleVerdict compare(const TinyInstance& instance, const BruteResult& oracle,
                      const TinySolution& solution);

std::string to_string(OracleMode mode);
OracleMode parse_oracle_mode(const std::string& text);

}  // namespace monge
