#include "monge/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "monge/config.hpp"
#include "monge/error.hpp"
#include "monge/oracle.hpp"
#include "monge/pipeline.hpp"

namespace monge {

namespace {

// The Randers torus shared by most criteria.
RunConfig randers_torus(int n) {
  RunConfig c;
  c.manifold_n = n;
  c.stencil = 16;
  c.metric_type = "randers";
  c.metric_g = "aniso 0.5";
  c.metric_omega = "swirl 0.3";
  c.mu0 = "gaussian 0.3 0.35 0.08";
  c.mu1 = "gaussian 0.65 0.6 0.08";
  return c;
}

struct Instance {
  DiscreteManifold manifold;
  CostModel model;
  std::vector<EdgeCost> costs;
};

Instance make_instance(const RunConfig& c) {
  DiscreteManifold m = build_manifold(c);
  CostModel model = build_cost_model(c, m);
  std::vector<EdgeCost> costs = compute_edge_costs(m, model);
  return {std::move(m), std::move(model), std::move(costs)};
}

class Suite {
 public:
  explicit Suite(const AcceptanceOptions& options) : options_(options) {}

  PipelineOptions pipeline_options() const {
    PipelineOptions p;
    p.tol_tight = options_.tol_tight;
    p.tol_cal = options_.tol_cal;
    p.threads = options_.threads;
    p.seed = options_.seed;
    p.quadruple_samples = 10000;
    return p;
  }

  // Gaussian-bump transport on the n = 32 Randers torus, solved once.
  struct Main {
    Instance instance;
    Marginals marginals;
    PipelineResult result;
  };
  const Main& main_run() {
    if (!main_) {
      const RunConfig c = randers_torus(32);
      Instance inst = make_instance(c);
      Marginals marg = build_marginals(c, inst.manifold);
      PipelineResult r = run_pipeline(inst.manifold, inst.costs, inst.model.delta(), marg,
                                      pipeline_options());
      main_.emplace(Main{std::move(inst), std::move(marg), std::move(r)});
    }
    return *main_;
  }

  CheckResult metric_axioms() {
    CheckResult r{1, "metric axioms", false, 0, 1e-9, {}, {}, 0};
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = make_instance(randers_torus(32));
    const CostTable table = all_pair_costs(inst.manifold, inst.costs, options_.threads);
    const MetricCertification cert = certify_metric_axioms(table, 100000, options_.seed);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.residual = cert.max_triangle_violation;
    r.passed = cert.max_triangle_violation <= 1e-9 && cert.max_diagonal == 0.0 &&
               cert.min_pair_sum > 0.0 && secs <= 60.0;
    r.details = to_json(cert);
    r.summary = "max|c(x,x)|=" + format_number(cert.max_diagonal) +
                " min c(x,y)+c(y,x)=" + format_number(cert.min_pair_sum);
    return r;
  }

  CheckResult finsler_equivalence() {
    CheckResult r{2, "Finsler/Mane equivalence", false, 0, 1e-12, {}, {}, 0};
    RunConfig c = randers_torus(16);
    const Instance finsler = make_instance(c);
    c.lagrangian_type = "tilde";
    c.lagrangian_k = 0.0;
    const Instance tilde = make_instance(c);
    double edge_diff = 0.0;
    for (std::size_t e = 0; e < finsler.costs.size(); ++e) {
      edge_diff = std::max(edge_diff, std::abs(finsler.costs[e].weight - tilde.costs[e].weight));
    }
    const CostTable a = all_pair_costs(finsler.manifold, finsler.costs, options_.threads);
    const CostTable b = all_pair_costs(tilde.manifold, tilde.costs, options_.threads);
    double pair_diff = 0.0;
    for (std::size_t x = 0; x < a.node_count(); ++x) {
      const auto ra = a.row(static_cast<NodeId>(x));
      const auto rb = b.row(static_cast<NodeId>(x));
      for (std::size_t y = 0; y < ra.size(); ++y) pair_diff = std::max(pair_diff, std::abs(ra[y] - rb[y]));
    }
    r.residual = edge_diff;
    r.passed = edge_diff <= 1e-12 && pair_diff <= 1e-9;
    r.details = {{"edges", finsler.costs.size()},
                 {"max_edge_difference", edge_diff},
                 {"max_cost_difference", pair_diff},
                 {"cost_threshold", 1e-9}};
    r.summary = "max all-pairs difference=" + format_number(pair_diff) + " (<= 1e-9)";
    return r;
  }

  CheckResult critical_value_check() {
    CheckResult r{3, "critical value", false, 0, 1e-6, {}, {}, 0};
    const DiscreteManifold m = build_torus_grid(16, Stencil::k16);
    const Lagrangian family = Lagrangian::quadratic(std::vector<Mat2>(m.node_count(), Mat2::Identity()),
                                                    std::vector<double>(m.node_count(), 1.0));
    const CriticalValue cv = critical_value(m, family, -2.0, 0.0, 1e-6);
    const bool lower_ok = verify_lower_certificate(m, family, cv.lower);
    const bool upper_ok = verify_upper_certificate(m, family, cv.upper);
    r.residual = std::abs(cv.estimate + 1.0);
    r.passed = r.residual <= 1e-6 && cv.k_hi - cv.k_lo <= 1e-6 && lower_ok && upper_ok;
    r.details = to_json(cv);
    r.details["expected"] = -1.0;
    r.details["lower_verified"] = lower_ok;
    r.details["upper_verified"] = upper_ok;
    r.summary = "k0 in [" + format_number(cv.k_lo) + ", " + format_number(cv.k_hi) +
                "], certificates " + (lower_ok && upper_ok ? "verified" : "REJECTED");
    return r;
  }

  CheckResult energy_of_minimisers() {
    CheckResult r{4, "energy of minimisers", false, 0, 1e-6, {}, {}, 0};
    RunConfig c = randers_torus(32);
    const DiscreteManifold m = build_manifold(c);
    c.lagrangian_type = "quadratic";
    c.lagrangian_g = "aniso 0.5";
    c.lagrangian_v = "wave 0.5 0.3";
    const Lagrangian quadratic = build_lagrangian(c, m);
    c.lagrangian_type = "tilde";
    const Lagrangian tilde = build_lagrangian(c, m);

    std::mt19937_64 rng(options_.seed);
    std::uniform_int_distribution<std::size_t> pick(0, m.edge_count() - 1);
    std::vector<EdgeId> edges(1000);
    for (auto& e : edges) e = static_cast<EdgeId>(pick(rng));

    double worst = 0.0;
    std::size_t irregular = 0, probes = 0;
    for (const Lagrangian* family : {&quadratic, &tilde}) {
      for (double k : {0.0, 0.5, 1.0}) {
        const Lagrangian l = family->with_shift(k);
        for (EdgeId id : edges) {
          const Edge& e = m.edge(id);
          const ActionProbe p = probe_edge_action(l, e.source, e.displacement);
          ++probes;
          if (p.status != ActionStatus::kRegular) {
            ++irregular;
            continue;
          }
          worst = std::max(worst, std::abs(l.energy(e.source, e.displacement / p.time) - k));
        }
      }
    }
    r.residual = worst;
    r.passed = irregular == 0 && worst <= 1e-6;
    r.details = {{"probes", probes}, {"irregular", irregular}, {"max_energy_residual", worst}};
    r.summary = std::to_string(probes) + " edge optima (2 families x k in {0, 1/2, 1})";
    return r;
  }

  CheckResult duality() {
    CheckResult r{5, "duality", false, 0, 1e-8, {}, {}, 0};
    const Main& run = main_run();
    const CostTable table = all_pair_costs(run.instance.manifold, run.instance.costs, options_.threads);
    const OptimalityCertificate cert =
        certify_optimality(run.result.primary.plan, run.result.primary.potential, table, 100000,
                           options_.seed);
    const double k = run.result.primary.optimal_value;
    const double gap = std::abs(cert.plan_cost - run.result.primary.dual_value);
    r.residual = gap / (1.0 + std::abs(k));
    r.passed = r.residual <= 1e-8 && cert.max_feasibility_violation <= 1e-9 &&
               cert.max_slackness_residual <= 1e-9;
    r.details = to_json(cert);
    r.details["K"] = k;
    r.details["dual"] = run.result.primary.dual_value;
    r.details["relative_gap"] = r.residual;
    r.summary = "K=" + format_number(k) + " feasibility=" +
                format_number(cert.max_feasibility_violation) + " slackness=" +
                format_number(cert.max_slackness_residual) + " (<= 1e-9)";
    return r;
  }

  CheckResult lexicographic() {
    CheckResult r{6, "lexicographic correctness", false, 0, 1e-9, {}, {}, 0};
    const auto start = std::chrono::steady_clock::now();
    std::size_t passed = 0, unique = 0;
    Json failures = Json::array();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int n = 2 + i % 6;
      const OracleMode mode = i % 2 == 0 ? OracleMode::kSyntheticMetric : OracleMode::kSlicedFromCostField;
      const std::uint64_t seed = options_.seed * 1000003ULL + static_cast<std::uint64_t>(i);
      const TinyInstance inst = random_instance(seed, n, mode);
      const BruteResult brute = brute_lexicographic(inst);
      OracleVerdict v;
      try {
        v = compare(inst, brute, solve_tiny_instance(inst, pipeline_options()));
      } catch (const Error& e) {
        v.message = e.what();
      }
      worst = std::max({worst, v.primary_error, v.secondary_error});
      if (brute.unique) ++unique;
      if (v.pass) {
        ++passed;
      } else {
        failures.push_back({{"seed", seed}, {"n", n}, {"mode", to_string(mode)}, {"message", v.message}});
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.residual = worst;
    r.passed = passed == 50 && secs <= 30.0;
    r.details = {{"instances", 50}, {"passed", passed}, {"unique_optima", unique}, {"failures", failures}};
    r.summary = std::to_string(passed) + "/50 match, " + std::to_string(unique) +
                " with unique optimum";
    return r;
  }

  CheckResult map_concentration() {
    CheckResult r{7, "map concentration", false, 0, 0, {}, {}, 0};
    RunConfig c = randers_torus(16);
    c.mu0 = "random-atoms 12";
    c.mu1 = "random-atoms 12";
    c.seed = options_.seed;
    const Instance inst = make_instance(c);
    const Marginals marg = build_marginals(c, inst.manifold);
    PipelineOptions po = pipeline_options();
    po.rays = false;
    const PipelineResult atoms = run_pipeline(inst.manifold, inst.costs, inst.model.delta(), marg, po);
    const auto& entries = atoms.selection.plan.entries;
    std::vector<int> hits(inst.manifold.node_count(), 0);
    for (const PlanEntry& e : entries) ++hits[static_cast<std::size_t>(e.target)];
    const bool permutation =
        atoms.selection.lambda.empty() && entries.size() == 12 &&
        std::all_of(marg.support1().begin(), marg.support1().end(),
                    [&](NodeId y) { return hits[static_cast<std::size_t>(y)] == 1; });

    const Main& run = main_run();
    const std::size_t bound = run.marginals.support0().size() + run.marginals.support1().size() - 1;
    const std::size_t support = run.result.selection.plan.entries.size();
    r.passed = permutation && support <= bound;
    r.residual = static_cast<double>(atoms.selection.lambda.size());
    r.details = {{"uniform_atoms", 12},
                 {"uniform_entries", entries.size()},
                 {"uniform_lambda", atoms.selection.lambda.size()},
                 {"permutation", permutation},
                 {"gaussian_support", support},
                 {"gaussian_support_bound", bound},
                 {"gaussian_lambda", run.result.selection.lambda.size()},
                 {"gaussian_lambda_mass", run.result.selection.lambda_mass}};
    r.summary = std::string(permutation ? "uniform atoms -> permutation" : "uniform atoms NOT a permutation") +
                "; gaussian support " + std::to_string(support) + " <= " + std::to_string(bound) +
                ", Lambda-mass=" + format_number(run.result.selection.lambda_mass);
    return r;
  }

  CheckResult monotonicity() {
    CheckResult r{8, "monotonicity and order", false, 0, 1e-9, {}, {}, 0};
    const Main& run = main_run();
    const MonotonicityReport& m = run.result.monotonicity;
    const RayAudit& a = run.result.rays->audit;
    r.residual = std::max(0.0, -std::min(m.min_increment, m.min_factored));
    r.passed = m.negative == 0 && m.min_increment >= -1e-9 && m.min_factored >= -1e-9 &&
               a.order_violations == 0;
    r.details = to_json(m);
    r.details["order_pairs"] = a.order_pairs;
    r.details["order_violations"] = a.order_violations;
    r.summary = std::to_string(m.applicable) + "/" + std::to_string(m.quadruples) +
                " applicable swaps, min increment " + format_number(m.min_increment) + ", " +
                std::to_string(a.order_violations) + " order violations in " +
                std::to_string(a.order_pairs) + " chain pairs";
    return r;
  }

  CheckResult ray_speed() {
    CheckResult r{9, "ray speed", false, 0, 1e-9, {}, {}, 0};
    struct Row {
      std::string name;
      double delta;
      RayAudit audit;
    };
    std::vector<Row> rows;
    const Main& run = main_run();
    rows.push_back({"randers n=32", run.result.delta, run.result.rays->audit});

    for (const char* type : {"tilde", "quadratic"}) {
      RunConfig c = randers_torus(16);
      c.lagrangian_type = type;
      if (c.lagrangian_type == "quadratic") {
        c.lagrangian_g = "aniso 0.5";
        c.lagrangian_v = "wave 0.5 0.3";
        c.lagrangian_k = 0.25;
      }
      const Instance inst = make_instance(c);
      const Marginals marg = build_marginals(c, inst.manifold);
      const PipelineResult p =
          run_pipeline(inst.manifold, inst.costs, inst.model.delta(), marg, pipeline_options());
      rows.push_back({std::string(type) + " n=16", p.delta, p.rays->audit});
    }

    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    Json list = Json::array();
    for (const Row& row : rows) {
      const double margin = row.audit.min_speed_ratio - row.delta;
      worst = std::min(worst, margin);
      ok = ok && row.audit.speed_violations == 0 && row.audit.calibrated_edges > 0 &&
           margin >= -1e-9;
      list.push_back({{"instance", row.name},
                      {"delta", row.delta},
                      {"calibrated_edges", row.audit.calibrated_edges},
                      {"min_speed_ratio", row.audit.min_speed_ratio},
                      {"violations", row.audit.speed_violations}});
    }
    r.residual = std::max(0.0, -worst);
    r.passed = ok;
    r.details = {{"instances", list}};
    r.summary = "min (u(y)-u(x))/t* - delta = " + format_number(worst);
    return r;
  }

  CheckResult refinement() {
    CheckResult r{10, "non-reproducible measure statements", false, 0, 0, {}, {}, 0};
    Json trend = Json::array();
    bool ok = true;
    for (int n : {16, 32, 64}) {
      const RunConfig c = randers_torus(n);
      const Instance inst = make_instance(c);
      const Marginals marg = build_marginals(c, inst.manifold);
      const PipelineResult p =
          run_pipeline(inst.manifold, inst.costs, inst.model.delta(), marg, pipeline_options());
      const double k = p.primary.optimal_value;
      const bool certified = std::abs(p.certificate.duality_gap) <= 1e-8 * (1.0 + std::abs(k)) &&
                             p.certificate.max_feasibility_violation <= 1e-9;
      ok = ok && certified;
      const double cell = inst.manifold.cell_volume();
      trend.push_back({{"n", n},
                       {"K", k},
                       {"certified", certified},
                       {"lambda_count", p.selection.lambda.size()},
                       {"lambda_mass", p.selection.lambda_mass},
                       {"ends", p.rays->classes.ends.size()},
                       {"ends_area", static_cast<double>(p.rays->classes.ends.size()) * cell},
                       {"transport_nodes", p.rays->classes.transport.size()},
                       {"degenerate_pivots", p.selection.degenerate_pivots}});
    }
    r.passed = ok;
    r.details = {{"statement",
                  "Zero Lebesgue measure of ray ends and uniqueness of the sigma-minimal plan for "
                  "absolutely continuous mu0 are measure-theoretic statements with no finite-grid "
                  "counterpart; they are replaced by criteria 6-9 and the reported trend below, "
                  "which is not asserted to converge."},
                 {"trend", trend}};
    std::ostringstream s;
    s << "reported only:";
    for (const auto& t : trend) {
      s << " n=" << t["n"].get<int>() << " Lambda-mass=" << format_number(t["lambda_mass"].get<double>())
        << " |E|*h^2=" << format_number(t["ends_area"].get<double>()) << ";";
    }
    r.summary = s.str();
    return r;
  }

 private:
  AcceptanceOptions options_;
  std::optional<Main> main_;
};

}  // namespace

bool VerificationReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerificationReport run_acceptance_suite(const AcceptanceOptions& options) {
  Suite suite(options);
  using Step = std::pair<int, std::function<CheckResult()>>;
  const std::vector<Step> steps = {
      {1, [&] { return suite.metric_axioms(); }},
      {2, [&] { return suite.finsler_equivalence(); }},
      {3, [&] { return suite.critical_value_check(); }},
      {4, [&] { return suite.energy_of_minimisers(); }},
      {5, [&] { return suite.duality(); }},
      {6, [&] { return suite.lexicographic(); }},
      {7, [&] { return suite.map_concentration(); }},
      {8, [&] { return suite.monotonicity(); }},
      {9, [&] { return suite.ray_speed(); }},
      {10, [&] { return suite.refinement(); }},
  };
  static const char* const kNames[] = {"",
                                       "metric axioms",
                                       "Finsler/Mane equivalence",
                                       "critical value",
                                       "energy of minimisers",
                                       "duality",
                                       "lexicographic correctness",
                                       "map concentration",
                                       "monotonicity and order",
                                       "ray speed",
                                       "non-reproducible measure statements"};
  VerificationReport report;
  for (const auto& [id, run] : steps) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult check;
    try {
      check = run();
    } catch (const std::exception& e) {
      check.criterion = id;
      check.name = kNames[id];
      check.passed = false;
      check.residual = std::numeric_limits<double>::infinity();
      check.summary = e.what();
      check.details = {{"error", e.what()}};
    }
    check.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.progress) *options.progress << format_check_line(check) << std::endl;
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::string format_check_line(const CheckResult& c) {
  std::ostringstream out;
  out << "criterion " << c.criterion << ": " << (c.passed ? "PASS" : "FAIL") << " " << c.name
      << " residual=" << format_number(c.residual) << " threshold=" << format_number(c.threshold);
  if (!c.summary.empty()) out << " | " << c.summary;
  return out.str();
}

Json to_json(const VerificationReport& report, bool with_timings) {
  Json checks = Json::array();
  Json timings = Json::object();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"criterion", c.criterion},
                      {"name", c.name},
                      {"status", c.passed ? "pass" : "fail"},
                      {"residual", std::isfinite(c.residual) ? Json(c.residual) : Json("inf")},
                      {"threshold", c.threshold},
                      {"summary", c.summary},
                      {"details", c.details}});
    timings[std::to_string(c.criterion)] = c.seconds;
  }
  Json out = {{"status", report.passed() ? "pass" : "fail"}, {"checks", checks}};
  if (with_timings) out["timings_seconds"] = timings;
  return out;
}

}  // namespace monge
