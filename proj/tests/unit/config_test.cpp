#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "monge/config.hpp"
#include "monge/error.hpp"

namespace monge {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kIo;
}

TEST(Config, ParsesKeys) {
  const auto c = parse(
      "# comment\n"
      "manifold.n = 12\n"
      "manifold.stencil = 8\n"
      "metric.type = riemannian   # trailing\n"
      "metric.G = 2 0 0 1\n"
      "lagrangian.type = quadratic\n"
      "lagrangian.k = 0.25\n"
      "mu0 = atoms 1 2 3\n"
      "absolutely_continuous = true\n"
      "tolerances.tight = 1e-8\n"
      "seed = 77\n"
      "samples.quadruples = 50\n");
  EXPECT_EQ(c.manifold_n, 12);
  EXPECT_EQ(c.stencil, 8);
  EXPECT_EQ(c.metric_type, "riemannian");
  EXPECT_EQ(c.metric_g, "2 0 0 1");
  EXPECT_EQ(c.lagrangian_k, 0.25);
  EXPECT_EQ(c.mu0, "atoms 1 2 3");
  EXPECT_TRUE(c.absolutely_continuous);
  EXPECT_EQ(c.tolerances.tol_tight, 1e-8);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.quadruple_samples, 50u);
}

TEST(Config, Rejections) {
  EXPECT_EQ(kind_of([] { parse("bogus = 1\n"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([] { parse("manifold.n\n"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([] { parse("manifold.n = twelve\n"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([] { parse("manifold.stencil = 4\n"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([] { parse("manifold.type = graph\n"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([] { load_config("/nonexistent/monge.cfg"); }), ErrorKind::kIo);
}

TEST(Config, DigestIgnoresRunLocation) {
  auto a = parse("seed = 3\n");
  auto b = parse("seed = 3\nthreads = 4\nout_dir = elsewhere\n");
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_NE(a.digest(), parse("seed = 4\n").digest());
  EXPECT_EQ(a.canonical(), b.canonical());
}

TEST(Config, BuildsDefaultInstance) {
  const RunConfig c;
  const auto m = build_manifold(c);
  EXPECT_EQ(m.node_count(), 1024u);
  const auto metric = build_metric(c, m);
  EXPECT_EQ(metric.kind(), MetricKind::kRanders);
  EXPECT_TRUE(build_cost_model(c, m).is_finsler());
  EXPECT_EQ(build_cost_model(c, m).delta(), 0.5);
  const auto mu = build_marginals(c, m);
  EXPECT_GT(mu.support0().size(), 100u);
}

TEST(Config, AnisotropicFields) {
  auto c = parse("manifold.n = 8\nmetric.G = aniso 0.5\nmetric.omega = swirl 0.3\n");
  const auto m = build_manifold(c);
  const auto g = build_metric(c, m);
  for (NodeId x = 0; x < 64; ++x) {
    EXPECT_GE(g.g(x)(0, 0), 1.0);
    EXPECT_LE(g.g(x)(0, 0), 1.5);
    EXPECT_LT(g.drift_norm(x), 0.3 + 1e-12);
  }
}

TEST(Config, LagrangianFloor) {
  auto c = parse("manifold.n = 4\nlagrangian.type = quadratic\nlagrangian.V = 0.5\nlagrangian.k = 0.2\n");
  const auto m = build_manifold(c);
  EXPECT_NEAR(build_cost_model(c, m).delta(), 0.7, 1e-15);
  c.lagrangian_type = "tilde";
  EXPECT_NEAR(build_cost_model(c, m).delta(), 0.7, 1e-15);
}

TEST(Measures, Kinds) {
  const auto m = build_torus_grid(8);
  auto total = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };

  const auto u = build_measure("uniform", m, 1, 0.0, ".");
  EXPECT_NEAR(u[5], 1.0 / 64, 1e-15);

  const auto a = build_measure("atoms 3 3 9", m, 1, 0.0, ".");
  EXPECT_NEAR(a[3], 2.0 / 3, 1e-15);
  EXPECT_NEAR(a[9], 1.0 / 3, 1e-15);

  const auto g = build_measure("gaussian 0.5 0.5 0.1", m, 1, 0.0, ".");
  EXPECT_NEAR(total(g), 1.0, 1e-12);
  EXPECT_EQ(std::max_element(g.begin(), g.end()) - g.begin(), 4 + 8 * 4);
  EXPECT_EQ(g[0], 0.0);

  const auto r1 = build_measure("random-atoms 5", m, 9, 0.0, ".");
  EXPECT_EQ(std::count_if(r1.begin(), r1.end(), [](double v) { return v > 0; }), 5);
  EXPECT_EQ(r1, build_measure("random-atoms 5", m, 9, 0.0, "."));

  const auto floored = build_measure("atoms 0", m, 1, 1e-9, ".");
  EXPECT_GT(*std::min_element(floored.begin(), floored.end()), 0.0);

  EXPECT_EQ(kind_of([&] { build_measure("atoms 64", m, 1, 0.0, "."); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(kind_of([&] { build_measure("spiral", m, 1, 0.0, "."); }), ErrorKind::kInvalidConfig);
}

TEST(Measures, FromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "monge_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "mu.txt") << "# node mass\n2 1.0\n5 3.0\n";
  const auto mu = build_measure("file mu.txt", build_torus_grid(3), 1, 0.0, dir.string());
  EXPECT_NEAR(mu[2], 0.25, 1e-15);
  EXPECT_NEAR(mu[5], 0.75, 1e-15);
}

TEST(Config, GraphManifoldFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "monge_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "tri.graph") << "node 0 0 0\nnode 1 1 0\nnode 2 0 1\nedge 0 1\nedge 1 2\nedge 2 0\n";
  std::ofstream(dir / "run.cfg") << "manifold.type = graph\nmanifold.graph_file = tri.graph\n"
                                 << "metric.type = euclidean\nmu0 = atoms 0\nmu1 = atoms 2\n";
  const auto c = load_config((dir / "run.cfg").string());
  const auto m = build_manifold(c);
  EXPECT_EQ(m.node_count(), 3u);
  EXPECT_EQ(m.topology(), Topology::kGeneralGraph);
}

}  // namespace
}  // namespace monge
