#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "monge/cost_engine.hpp"
#include "monge/geometry.hpp"
#include "monge/ot_solver.hpp"

namespace monge {

struct Tolerances {
  double tol_tight = 0.0;  // 0: 1e−9 (1 + max edge weight)
  double tol_cal = 0.0;    // 0: 2 · tol_tight
  double solver = 1e-12;   // relative tolerance of the edge-action minimiser
  double k0 = 1e-6;        // bracket width for the critical value
};

// Everything a run depends on. Marginal and field entries keep their textual
// form and are expanded against the manifold by the build_* helpers.
struct RunConfig {
  std::string manifold_type = "torus2d";  // torus2d | graph
  int manifold_n = 32;
  int stencil = 16;
  std::string graph_file;

  std::string metric_type = "randers";  // euclidean | riemannian | randers
  std::string metric_g = "1 0 0 1";     // 4 numbers, "aniso <amp>", or @file
  std::string metric_omega = "swirl 0.3";  // 2 numbers, "swirl <amp>", or @file

  std::string lagrangian_type = "none";  // none | tilde | quadratic
  double lagrangian_k = 0.0;
  std::string lagrangian_g = "1 0 0 1";
  std::string lagrangian_v = "0";  // number, "wave <a> <b>", or @file

  std::string mu0 = "gaussian 0.3 0.35 0.08";
  std::string mu1 = "gaussian 0.65 0.6 0.08";
  bool absolutely_continuous = false;

  Tolerances tolerances;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";

  std::size_t pair_samples = 100000;
  std::size_t quadruple_samples = 10000;
  std::size_t triple_samples = 100000;

  std::string base_dir = ".";  // relative file references resolve here

  // Canonical key = value listing (sorted keys, full precision).
  std::string canonical() const;
  // Short SHA-256 of canonical().
  std::string digest() const;
};

// Parses `key = value` lines; '#' starts a comment. Unknown keys and
// malformed values raise invalid-config.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
// Throws io-error if the file cannot be opened.
RunConfig load_config(const std::string& path);
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

DiscreteManifold build_manifold(const RunConfig& config);
FinslerMetric build_metric(const RunConfig& config, const DiscreteManifold& manifold);
// Lagrangian family (shift = lagrangian.k) for tilde or quadratic configs.
Lagrangian build_lagrangian(const RunConfig& config, const DiscreteManifold& manifold);
CostModel build_cost_model(const RunConfig& config, const DiscreteManifold& manifold);
Marginals build_marginals(const RunConfig& config, const DiscreteManifold& manifold);

// One marginal from its textual spec, normalised to mass 1. A positive floor
// is added at every node before normalising.
std::vector<double> build_measure(const std::string& spec, const DiscreteManifold& manifold,
                                  std::uint64_t seed, double floor, const std::string& base_dir);

}  // namespace monge
