#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "monge/min_cost_flow.hpp"
#include "monge/network_simplex.hpp"

namespace monge {
namespace {

std::vector<TransportArc> dense_arcs(int m, int n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<TransportArc> arcs;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) arcs.push_back({i, j, u(rng)});
  }
  return arcs;
}

void expect_marginals(const NetworkSimplexResult& r, std::span<const TransportArc> arcs,
                      std::span<const double> supply, std::span<const double> demand) {
  std::vector<double> rows(supply.size(), 0.0), cols(demand.size(), 0.0);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    EXPECT_GE(r.flow[a], 0.0);
    rows[arcs[a].from] += r.flow[a];
    cols[arcs[a].to] += r.flow[a];
  }
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i], supply[i], 1e-12);
  for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_NEAR(cols[j], demand[j], 1e-12);
}

TEST(NetworkSimplex, AssignmentAgainstPermutations) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    const auto arcs = dense_arcs(n, n, rng, 0.0, 1.0);
    const std::vector<double> mass(n, 1.0 / n);
    const auto r = solve_transportation(mass, mass, arcs);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += arcs[i * n + perm[i]].cost / n;
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(r.objective, best, 1e-12);
    EXPECT_EQ(r.artificial_flow, 0.0);
    expect_marginals(r, arcs, mass, mass);
  }
}

// Independent oracle: successive shortest paths on the bipartite network.
TEST(NetworkSimplex, UnequalMassesAgainstFlow) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + trial % 6, n = 2 + trial % 7;
    auto arcs = dense_arcs(m, n, rng, 0.1, 2.0);
    std::vector<double> supply(m), demand(n);
    for (auto& s : supply) s = mass(rng);
    for (auto& d : demand) d = mass(rng);
    const double ts = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double td = std::accumulate(demand.begin(), demand.end(), 0.0);
    for (auto& s : supply) s /= ts;
    for (auto& d : demand) d /= td;
    // Sparsify but keep the northwest-corner staircase so a plan exists.
    std::vector<bool> staircase(arcs.size(), false);
    {
      std::vector<double> s = supply, d = demand;
      int i = 0, j = 0;
      while (i < m && j < n) {
        staircase[i * n + j] = true;
        const double q = std::min(s[i], d[j]);
        s[i] -= q;
        d[j] -= q;
        if (i == m - 1) ++j;
        else if (j == n - 1) ++i;
        else if (s[i] <= d[j]) ++i;
        else ++j;
      }
    }
    std::vector<TransportArc> kept;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (staircase[a] || rng() % 3 != 0) kept.push_back(arcs[a]);
    }
    const auto r = solve_transportation(supply, demand, kept);
    EXPECT_EQ(r.artificial_flow, 0.0);
    expect_marginals(r, kept, supply, demand);

    std::vector<FlowArc> flow_arcs;
    for (const auto& a : kept) flow_arcs.push_back({a.from, m + a.to, a.cost});
    std::vector<double> balance(m + n);
    for (int i = 0; i < m; ++i) balance[i] = supply[i];
    for (int j = 0; j < n; ++j) balance[m + j] = -demand[j];
    double shift = 0.0;
    for (double b : balance) shift += b;
    balance[m] -= shift;
    EXPECT_NEAR(r.objective, min_cost_flow(m + n, flow_arcs, balance).cost, 1e-12);

    std::size_t support = 0;
    for (double f : r.flow) support += f > 0.0;
    EXPECT_LE(support, static_cast<std::size_t>(m + n - 1));
  }
}

TEST(NetworkSimplex, InfeasibleArcsCarryArtificialFlow) {
  const std::vector<double> supply = {0.5, 0.5}, demand = {0.5, 0.5};
  const std::vector<TransportArc> arcs = {{0, 0, 1.0}, {1, 0, 1.0}};
  EXPECT_GT(solve_transportation(supply, demand, arcs).artificial_flow, 0.4);
}

TEST(NetworkSimplex, DegenerateTiesTerminate) {
  const int n = 6;
  std::vector<TransportArc> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) arcs.push_back({i, j, 1.0});
  }
  const std::vector<double> mass(n, 1.0 / n);
  const auto r = solve_transportation(mass, mass, arcs);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
  expect_marginals(r, arcs, mass, mass);
}

}  // namespace
}  // namespace monge
