#pragma once

#include <string>
#include <vector>

#include "iftrace/finding.hpp"
#include "iftrace/graph.hpp"
#include "iftrace/taint.hpp"

namespace iftrace {

enum class LeakageType { Confidentiality, Integrity, TimingSideChannel, None, Other };

struct ReportTransform {
  std::string from_module;
  std::string source;
  std::string sink;
  std::string to_module;

  bool operator==(const ReportTransform&) const = default;
};

// Final design-wide verdict.
struct LeakageReport {
  bool vulnerability_found = false;
  std::vector<std::string> vulnerable_modules;
  std::vector<std::string> leakage_path;  // module sequence
  LeakageType leakage_type = LeakageType::None;
  std::string explanation;
  std::vector<ReportTransform> transformations;
};

const char* leakage_type_name(LeakageType t);

// Same extraction discipline as parse_finding. Unknown leakage_type strings
// map to `other` with the original noted in the explanation.
LeakageReport parse_report(const std::string& raw);

// Canonical serialization: fixed key order, 2-space indent, trailing newline.
std::string report_to_json(const LeakageReport& r);

struct Violation {
  std::string code;  // "UnknownModule" | "DisconnectedPath" | "InconsistentVerdict"
  std::string message;
};

// Checks a report against the design graph: verdict/field consistency, known
// modules only, and a connected leakage path (edges may be traversed in
// either direction, since data crosses parent/child ports both ways).
std::vector<Violation> validate_report(const LeakageReport& r, const DesignGraph& g);

// Ground-truth report from the taint fixpoint: a vulnerability exists iff an
// asset tag reaches an output port of `top`.
LeakageReport report_from_taint(const TaintState& state, const std::string& top);

extern const char* const kReportSchemaText;

}  // namespace iftrace
