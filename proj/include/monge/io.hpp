#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "monge/cost_engine.hpp"
#include "monge/ot_solver.hpp"
#include "monge/pipeline.hpp"
#include "monge/rays.hpp"
#include "monge/selector.hpp"

namespace monge {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form.
std::string format_number(double value);

// CSV file whose first line is `# config_digest=<digest>`, then a header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& digest,
            std::initializer_list<std::string> header);
  void row(const std::vector<std::string>& cells);

 private:
  std::string path_;
  std::ofstream out_;
};

// Writes a JSON document with "config_digest" as its first field.
void write_json(const std::string& path, const std::string& digest, const Json& body);
void ensure_directory(const std::string& path);

Json to_json(const TransportPlan& plan);
Json to_json(const OptimalityCertificate& certificate);
Json to_json(const SelectionResult& selection);
Json to_json(const MonotonicityReport& report);
Json to_json(const RayAudit& audit);
Json to_json(const RayOutputs& rays, bool with_chains = true);
Json to_json(const CriticalValue& value);
Json to_json(const MetricCertification& certification);
Json to_json(const PipelineResult& result);

}  // namespace monge
