#include "monge/io.hpp"

#include <charconv>
#include <filesystem>

#include "monge/error.hpp"

namespace monge {

std::string format_number(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory '" + path + "': " + ec.message());
}

CsvWriter::CsvWriter(const std::string& path, const std::string& digest,
                     std::initializer_list<std::string> header)
    : path_(path), out_(path) {
  if (!out_) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out_ << "# config_digest=" << digest << "\n";
  bool first = true;
  for (const auto& h : header) {
    out_ << (first ? "" : ",") << h;
    first = false;
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  if (!out_) throw Error(ErrorKind::kIo, "write to '" + path_ + "' failed");
}

void write_json(const std::string& path, const std::string& digest, const Json& body) {
  Json doc;
  doc["config_digest"] = digest;
  for (const auto& [key, value] : body.items()) doc[key] = value;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << doc.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

Json to_json(const TransportPlan& plan) {
  Json a = Json::array();
  for (const PlanEntry& e : plan.entries) a.push_back({{"i", e.source}, {"j", e.target}, {"mass", e.mass}});
  return a;
}

Json to_json(const OptimalityCertificate& c) {
  return {{"pairs_checked", c.pairs_checked},
          {"max_feasibility_violation", c.max_feasibility_violation},
          {"max_slackness_residual", c.max_slackness_residual},
          {"plan_cost", c.plan_cost},
          {"dual_value", c.dual_value},
          {"duality_gap", c.duality_gap}};
}

Json to_json(const SelectionResult& s) {
  Json map = Json::array();
  for (const MapEntry& m : s.map) map.push_back({{"source", m.source}, {"target", m.target}});
  return {{"pairs", to_json(s.plan)},
          {"primary_cost", s.plan.primary_cost},
          {"secondary_cost", s.secondary_cost},
          {"map", map},
          {"lambda", s.lambda},
          {"lambda_mass", s.lambda_mass},
          {"pivots", s.pivots},
          {"degenerate_pivots", s.degenerate_pivots}};
}

Json to_json(const MonotonicityReport& r) {
  return {{"quadruples", r.quadruples},         {"applicable", r.applicable},
          {"min_increment", r.min_increment},   {"negative", r.negative},
          {"on_common_chain", r.on_common_chain}, {"min_factored", r.min_factored}};
}

Json to_json(const RayAudit& a) {
  return {{"calibrated_edges", a.calibrated_edges},
          {"min_speed_ratio", a.min_speed_ratio},
          {"speed_violations", a.speed_violations},
          {"order_pairs", a.order_pairs},
          {"order_violations", a.order_violations},
          {"chains", a.chains},
          {"max_lambda_per_chain", a.max_lambda_per_chain},
          {"chains_with_lambda", a.chains_with_lambda},
          {"unjoined_support_pairs", a.unjoined_support_pairs}};
}

Json to_json(const RayOutputs& r, bool with_chains) {
  Json j = {{"alpha", r.times.alpha},
            {"beta", r.times.beta},
            {"T", r.classes.transport},
            {"T_eps", r.classes.interior},
            {"ends", r.classes.ends}};
  if (with_chains) j["chains"] = r.chains;
  j["audit"] = to_json(r.audit);
  return j;
}

Json to_json(const CriticalValue& v) {
  Json lower = {{"shift", v.lower.shift},
                {"cycle", v.lower.cycle},
                {"times", v.lower.times},
                {"cycle_action", v.lower.cycle_action}};
  lower["subcritical_edge"] = v.lower.subcritical_edge ? Json(*v.lower.subcritical_edge) : Json(nullptr);
  return {{"k_lo", v.k_lo},
          {"k_hi", v.k_hi},
          {"estimate", v.estimate},
          {"iterations", v.iterations},
          {"lower_certificate", lower},
          {"upper_certificate",
           {{"shift", v.upper.shift},
            {"min_edge_weight", v.upper.min_edge_weight},
            {"argmin_edge", v.upper.argmin_edge}}}};
}

Json to_json(const MetricCertification& c) {
  return {{"triples", c.triples},
          {"max_triangle_violation", c.max_triangle_violation},
          {"max_diagonal", c.max_diagonal},
          {"min_pair_sum", c.min_pair_sum}};
}

Json to_json(const PipelineResult& r) {
  Json j = {{"K", r.primary.optimal_value},
            {"dual_value", r.primary.dual_value},
            {"delta", r.delta},
            {"tol_tight", r.tol_tight},
            {"tol_cal", r.tol_cal},
            {"anchor", r.primary.potential.anchor},
            {"certificate", to_json(r.certificate)},
            {"tight_pairs", r.tight.size()},
            {"selection_primary_gap", r.selection_primary_gap},
            {"monotonicity", to_json(r.monotonicity)}};
  if (r.rays) {
    j["rays"] = {{"T", r.rays->classes.transport.size()},
                 {"T_eps", r.rays->classes.interior.size()},
                 {"ends", r.rays->classes.ends.size()},
                 {"audit", to_json(r.rays->audit)}};
  }
  return j;
}

}  // namespace monge
