#pragma once

#include "occam/case_studies.hpp"
#include "occam/scenario.hpp"

#include "json.hpp"

#include <string>

namespace occam {

/// Identifies the report layout described in docs/report.schema.json.
inline constexpr const char* kReportSchemaId = "occam-report/1";

/// JSON documents with keys in a fixed insertion order. Non-finite numbers
/// are written as null; every log-domain quantity also carries a "linear"
/// string rendered from the log so it never under- or overflows.
nlohmann::ordered_json report_to_json(const CaseReport& report);
nlohmann::ordered_json report_to_json(const ScenarioEvaluation& evaluation);

/// report_to_json(...).dump(2) followed by a newline.
std::string serialize_report(const CaseReport& report);
std::string serialize_report(const ScenarioEvaluation& evaluation);

/// Number or null for non-finite input.
nlohmann::ordered_json json_number(double x);

}  // namespace occam
