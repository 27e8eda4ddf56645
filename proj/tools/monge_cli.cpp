// Command-line front end: cost, solve, rays, oracle, verify, export.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monge/config.hpp"
#include "monge/error.hpp"
#include "monge/io.hpp"
#include "monge/oracle.hpp"
#include "monge/pipeline.hpp"
#include "monge/verification.hpp"

namespace {

using namespace monge;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCertification = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

RunConfig resolve_config(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (g.out_dir) c.out_dir = *g.out_dir;
  if (g.threads) c.threads = *g.threads;
  ensure_directory(c.out_dir);
  return c;
}

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

// Configuration problems exit 1, mathematical failures exit 2.
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kIo:
    case ErrorKind::kSize:
    case ErrorKind::kMarginal:
    case ErrorKind::kConnectivity:
    case ErrorKind::kBracket:
      return kExitUsage;
    default:
      return kExitCertification;
  }
}

std::vector<NodeId> parse_sources(const std::string& text, std::size_t n) {
  std::vector<NodeId> out;
  if (text == "all") {
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<NodeId>(i));
    return out;
  }
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 0 || v >= static_cast<long>(n)) throw std::out_of_range(item);
      out.push_back(static_cast<NodeId>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidConfig, "bad source '" + item + "'");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> read_potential_csv(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open potential '" + path + "'");
  std::vector<double> u(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || line.rfind("node", 0) == 0) continue;
    const auto comma = line.find(',');
    try {
      const long node = std::stol(line.substr(0, comma));
      if (comma == std::string::npos || node < 0 || node >= static_cast<long>(n)) throw std::out_of_range(line);
      u[static_cast<std::size_t>(node)] = std::stod(line.substr(comma + 1));
      seen[static_cast<std::size_t>(node)] = true;
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidConfig, "malformed potential row '" + line + "'");
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::kInvalidConfig, "potential file does not cover every node");
  }
  return u;
}

void write_potential(const std::string& path, const std::string& digest, const DualPotential& p) {
  CsvWriter csv(path, digest, {"node", "u"});
  for (std::size_t v = 0; v < p.u.size(); ++v) csv.row({std::to_string(v), format_number(p.u[v])});
}

bool certified(const OptimalityCertificate& c, double k) {
  return c.max_feasibility_violation <= 1e-9 && c.max_slackness_residual <= 1e-9 &&
         std::abs(c.duality_gap) <= 1e-8 * (1.0 + std::abs(k));
}

PipelineOptions pipeline_options(const RunConfig& c) {
  PipelineOptions p;
  p.tol_tight = c.tolerances.tol_tight;
  p.tol_cal = c.tolerances.tol_cal;
  p.epsilon = c.epsilon;
  p.threads = c.threads;
  p.quadruple_samples = c.quadruple_samples;
  p.seed = c.seed;
  return p;
}

ActionSolverOptions solver_options(const RunConfig& c) {
  ActionSolverOptions o;
  o.relative_tolerance = c.tolerances.solver;
  return o;
}

// ---------------------------------------------------------------------------

struct CostArgs {
  std::string sources = "all";
  std::string out;
  bool critical = false;
  double k_lo = -2.0;
  double k_hi = 2.0;
  std::optional<double> tol;
};

int cmd_cost(const Globals& g, const CostArgs& a) {
  const RunConfig c = resolve_config(g);
  const std::string digest = c.digest();
  const DiscreteManifold m = build_manifold(c);

  if (a.critical) {
    const Lagrangian family = build_lagrangian(c, m);
    const CriticalValue cv =
        critical_value(m, family, a.k_lo, a.k_hi, a.tol.value_or(c.tolerances.k0), solver_options(c));
    Json body = to_json(cv);
    body["lower_verified"] = verify_lower_certificate(m, family, cv.lower);
    body["upper_verified"] = verify_upper_certificate(m, family, cv.upper, solver_options(c));
    const std::string path = out_path(c, "critical.json");
    write_json(path, digest, body);
    std::cout << "k0 in [" << format_number(cv.k_lo) << ", " << format_number(cv.k_hi)
              << "] estimate " << format_number(cv.estimate) << " -> " << path << "\n";
    return body["lower_verified"].get<bool>() && body["upper_verified"].get<bool>()
               ? kExitOk
               : kExitCertification;
  }

  const CostModel model = build_cost_model(c, m);
  const std::vector<EdgeCost> costs = compute_edge_costs(m, model, solver_options(c));
  const std::vector<NodeId> sources = parse_sources(a.sources, m.node_count());
  const std::string path = a.out.empty() ? out_path(c, "costs.csv") : a.out;
  CsvWriter csv(path, digest, {"source", "target", "cost"});
  // Bounded batches keep memory flat for large grids.
  const std::size_t batch = std::max<std::size_t>(1, (std::size_t{1} << 22) / m.node_count());
  for (std::size_t begin = 0; begin < sources.size(); begin += batch) {
    const std::size_t end = std::min(sources.size(), begin + batch);
    const CostTable table = cost_rows(m, costs, std::span<const NodeId>(sources.data() + begin, end - begin),
                                      c.threads, model.digest());
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = table.row(sources[i]);
      for (std::size_t y = 0; y < row.size(); ++y) {
        csv.row({std::to_string(sources[i]), std::to_string(y), format_number(row[y])});
      }
    }
  }
  std::cout << sources.size() << " cost rows over " << m.node_count() << " nodes -> " << path << "\n";
  return kExitOk;
}

struct SolveArgs {
  bool primary_only = false;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  const RunConfig c = resolve_config(g);
  const std::string digest = c.digest();
  const DiscreteManifold m = build_manifold(c);
  const Marginals marginals = build_marginals(c, m);
  const CostModel model = build_cost_model(c, m);
  const std::vector<EdgeCost> costs = compute_edge_costs(m, model, solver_options(c));

  if (a.primary_only) {
    const PrimarySolution primary = solve_primary(m, costs, marginals);
    const TightScan scan = tight_set_batched(m, costs, marginals, primary,
                                             default_tight_tolerance(costs), c.threads);
    write_potential(out_path(c, "potential.csv"), digest, primary.potential);
    Json body = {{"K", primary.optimal_value},
                 {"dual_value", primary.dual_value},
                 {"plan", to_json(primary.plan)},
                 {"certificate", to_json(scan.certificate)}};
    write_json(out_path(c, "plan.json"), digest, body);
    const bool ok = certified(scan.certificate, primary.optimal_value);
    std::cout << "K=" << format_number(primary.optimal_value) << " certificate "
              << (ok ? "passed" : "FAILED") << " -> " << c.out_dir << "\n";
    return ok ? kExitOk : kExitCertification;
  }

  PipelineOptions po = pipeline_options(c);
  po.rays = false;
  const PipelineResult r = run_pipeline(m, costs, model.delta(), marginals, po);
  write_potential(out_path(c, "potential.csv"), digest, r.primary.potential);
  write_json(out_path(c, "plan.json"), digest,
             {{"K", r.primary.optimal_value},
              {"plan", to_json(r.primary.plan)},
              {"certificate", to_json(r.certificate)}});
  write_json(out_path(c, "selection.json"), digest, to_json(r.selection));
  {
    CsvWriter csv(out_path(c, "map.csv"), digest, {"source", "target", "x0", "y0", "x1", "y1"});
    for (const MapEntry& e : r.selection.map) {
      const Vec2& p = m.position(e.source);
      const Vec2& q = m.position(e.target);
      csv.row({std::to_string(e.source), std::to_string(e.target), format_number(p.x()),
               format_number(p.y()), format_number(q.x()), format_number(q.y())});
    }
  }
  const bool ok = certified(r.certificate, r.primary.optimal_value) &&
                  r.selection_primary_gap <= static_cast<double>(r.selection.plan.entries.size()) * r.tol_tight + 1e-12;
  Json metrics = to_json(r);
  metrics["secondary_cost"] = r.selection.secondary_cost;
  metrics["lambda_count"] = r.selection.lambda.size();
  metrics["lambda_mass"] = r.selection.lambda_mass;
  metrics["degenerate_pivots"] = r.selection.degenerate_pivots;
  metrics["certified"] = ok;
  write_json(out_path(c, "metrics.json"), digest, metrics);
  std::cout << "K=" << format_number(r.primary.optimal_value)
            << " secondary=" << format_number(r.selection.secondary_cost)
            << " |Lambda|=" << r.selection.lambda.size()
            << " Lambda-mass=" << format_number(r.selection.lambda_mass) << " certificate "
            << (ok ? "passed" : "FAILED") << " -> " << c.out_dir << "\n";
  return ok ? kExitOk : kExitCertification;
}

struct RaysArgs {
  std::string potential;
  std::optional<double> epsilon;
  std::string out;
};

int cmd_rays(const Globals& g, const RaysArgs& a) {
  const RunConfig c = resolve_config(g);
  const std::string digest = c.digest();
  const DiscreteManifold m = build_manifold(c);
  const CostModel model = build_cost_model(c, m);
  const std::vector<EdgeCost> costs = compute_edge_costs(m, model, solver_options(c));
  const double eps = a.epsilon.value_or(c.epsilon);

  DualPotential u;
  TransportPlan plan;
  std::vector<NodeId> lambda;
  double tol_cal = c.tolerances.tol_cal;
  if (!a.potential.empty()) {
    u.u = read_potential_csv(a.potential, m.node_count());
  } else {
    const PipelineResult r =
        run_pipeline(m, costs, model.delta(), build_marginals(c, m), pipeline_options(c));
    u = r.primary.potential;
    plan = r.selection.plan;
    lambda = r.selection.lambda;
    tol_cal = r.tol_cal;
  }
  if (!(tol_cal > 0.0)) tol_cal = 2.0 * default_tight_tolerance(costs);

  RayOutputs rays;
  rays.graph = calibrated_edges(m, costs, u, tol_cal);
  rays.times = alpha_beta(rays.graph);
  rays.classes = classify(rays.times, eps);
  rays.chains = maximal_chains(rays.graph, rays.times);
  rays.audit = ray_audits(rays.graph, rays.chains, plan, lambda, model.delta());
  Json body = to_json(rays);
  body["epsilon"] = eps;
  body["delta"] = model.delta();
  const std::string path = a.out.empty() ? out_path(c, "rays.json") : a.out;
  write_json(path, digest, body);
  std::cout << "|T|=" << rays.classes.transport.size() << " |T_eps|=" << rays.classes.interior.size()
            << " |E|=" << rays.classes.ends.size() << " chains=" << rays.chains.size() << " -> "
            << path << "\n";
  const bool ok = rays.audit.speed_violations == 0 && rays.audit.order_violations == 0;
  return ok ? kExitOk : kExitCertification;
}

struct OracleArgs {
  int n = 5;
  int seeds = 10;
  std::string mode = "synthetic";
};

int cmd_oracle(const Globals& g, const OracleArgs& a) {
  const std::uint64_t base = g.seed.value_or(1);
  const OracleMode mode = parse_oracle_mode(a.mode);
  int passed = 0;
  for (int s = 0; s < a.seeds; ++s) {
    const std::uint64_t seed = base + static_cast<std::uint64_t>(s);
    const TinyInstance inst = random_instance(seed, a.n, mode);
    const BruteResult brute = brute_lexicographic(inst);
    OracleVerdict v;
    try {
      v = compare(inst, brute, solve_tiny_instance(inst));
    } catch (const Error& e) {
      v.message = e.what();
    }
    if (v.pass) ++passed;
    Json rec = {{"seed", seed},
                {"n", a.n},
                {"mode", to_string(mode)},
                {"verdict", v.pass ? "pass" : "fail"},
                {"oracle_primary", brute.primary},
                {"oracle_secondary", brute.secondary},
                {"unique", brute.unique},
                {"primary_error", v.primary_error},
                {"secondary_error", v.secondary_error},
                {"support_compared", v.support_compared},
                {"message", v.message}};
    std::cout << rec.dump() << "\n";
  }
  std::cout << "summary: " << passed << "/" << a.seeds << " pass\n";
  return passed == a.seeds ? kExitOk : kExitCertification;
}

int cmd_verify(const Globals& g) {
  const RunConfig c = resolve_config(g);
  AcceptanceOptions o;
  o.seed = c.seed;
  o.threads = c.threads;
  o.tol_tight = c.tolerances.tol_tight;
  o.tol_cal = c.tolerances.tol_cal;
  o.progress = &std::cout;
  const VerificationReport report = run_acceptance_suite(o);
  const std::string path = out_path(c, "verify.json");
  write_json(path, c.digest(), to_json(report));
  std::cout << (report.passed() ? "all checks pass" : "some checks FAILED") << " -> " << path << "\n";
  return report.passed() ? kExitOk : kExitCertification;
}

int cmd_export(const Globals& g) {
  const RunConfig c = resolve_config(g);
  const std::string digest = c.digest();
  const DiscreteManifold m = build_manifold(c);
  const Marginals marginals = build_marginals(c, m);
  const CostModel model = build_cost_model(c, m);
  const std::vector<EdgeCost> costs = compute_edge_costs(m, model, solver_options(c));
  const PipelineResult r = run_pipeline(m, costs, model.delta(), marginals, pipeline_options(c));

  const std::size_t n = m.node_count();
  std::vector<std::string> target(n, "");
  std::vector<int> flags(n, 0);  // 1 T, 2 T_eps, 4 end, 8 Lambda
  for (const MapEntry& e : r.selection.map) target[static_cast<std::size_t>(e.source)] = std::to_string(e.target);
  for (NodeId v : r.rays->classes.transport) flags[static_cast<std::size_t>(v)] |= 1;
  for (NodeId v : r.rays->classes.interior) flags[static_cast<std::size_t>(v)] |= 2;
  for (NodeId v : r.rays->classes.ends) flags[static_cast<std::size_t>(v)] |= 4;
  for (NodeId v : r.selection.lambda) flags[static_cast<std::size_t>(v)] |= 8;

  const std::string path = out_path(c, "nodes.csv");
  CsvWriter csv(path, digest,
                {"node", "x", "y", "mu0", "mu1", "u", "alpha", "beta", "in_T", "in_T_eps", "is_end",
                 "in_lambda", "map_target"});
  for (std::size_t v = 0; v < n; ++v) {
    const Vec2& p = m.positions()[v];
    csv.row({std::to_string(v), format_number(p.x()), format_number(p.y()),
             format_number(marginals.mu0()[v]), format_number(marginals.mu1()[v]),
             format_number(r.primary.potential.u[v]), format_number(r.rays->times.alpha[v]),
             format_number(r.rays->times.beta[v]), std::to_string((flags[v] & 1) != 0),
             std::to_string((flags[v] & 2) != 0), std::to_string((flags[v] & 4) != 0),
             std::to_string((flags[v] & 8) != 0), target[v]});
  }
  std::cout << n << " nodes -> " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport with Finsler and Mane costs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Run configuration (key = value)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Output directory")->envname("MONGE_OUT_DIR");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");

  CostArgs cost;
  auto* cost_cmd = app.add_subcommand("cost", "Edge costs, Mane potential rows, critical value");
  cost_cmd->add_option("--sources", cost.sources, "all or a comma list of nodes");
  cost_cmd->add_option("--out", cost.out, "CSV path (default <out-dir>/costs.csv)");
  cost_cmd->add_flag("--critical", cost.critical, "Bracket the critical value k0");
  cost_cmd->add_option("--k-lo", cost.k_lo, "Lower end of the k bracket");
  cost_cmd->add_option("--k-hi", cost.k_hi, "Upper end of the k bracket");
  cost_cmd->add_option("--tol", cost.tol, "Bracket width");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Two-stage transport solve");
  solve_cmd->add_flag("--primary-only", solve.primary_only, "Stop after the Kantorovich stage");

  RaysArgs rays;
  auto* rays_cmd = app.add_subcommand("rays", "Calibrated edges, alpha/beta, T, T_eps, ray ends");
  rays_cmd->add_option("--potential", rays.potential, "Potential CSV (node,u); solves if absent");
  rays_cmd->add_option("--epsilon", rays.epsilon, "Threshold for T_eps");
  rays_cmd->add_option("--out", rays.out, "JSON path (default <out-dir>/rays.json)");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force comparison on tiny instances");
  oracle_cmd->add_option("--n", oracle.n, "Atoms per side (1..8)");
  oracle_cmd->add_option("--seeds", oracle.seeds, "Number of seeds");
  oracle_cmd->add_option("--mode", oracle.mode, "synthetic or sliced");

  auto* verify_cmd = app.add_subcommand("verify", "Acceptance suite");
  auto* export_cmd = app.add_subcommand("export", "Per-node table for plotting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cost_cmd->parsed()) return cmd_cost(g, cost);
    if (solve_cmd->parsed()) return cmd_solve(g, solve);
    if (rays_cmd->parsed()) return cmd_rays(g, rays);
    if (oracle_cmd->parsed()) return cmd_oracle(g, oracle);
    if (verify_cmd->parsed()) return cmd_verify(g);
    if (export_cmd->parsed()) return cmd_export(g);
  } catch (const Error& e) {
    std::cerr << "monge: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "monge: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
