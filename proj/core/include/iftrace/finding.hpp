#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/ast.hpp"

namespace iftrace {

enum class FlowScope { Internal, External };

struct Flow {
  std::string source;
  std::string sink;
  FlowScope scope = FlowScope::Internal;

  bool operator==(const Flow&) const = default;
};

// Per-module analysis result: sensitive sources, influenced assets,
// transformations applied to the data, and signal-level flows.
struct ModuleFinding {
  std::string module;
  std::vector<std::string> sensitive_sources;
  std::vector<std::string> influenced_assets;
  std::vector<std::string> transformations;
  std::vector<Flow> flows;

  bool operator==(const ModuleFinding&) const = default;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string raw, std::string failure);
  const std::string& raw() const { return raw_; }
  const std::string& failure() const { return failure_; }

 private:
  std::string raw_;
  std::string failure_;
};

// Extracts the first balanced JSON object from `raw` (code fences and
// surrounding prose tolerated), validates it against the finding schema, and
// normalizes signal names to their declared case when `decl` is given.
// Missing list keys default to empty. Throws SchemaError otherwise; never
// returns a partially populated finding.
ModuleFinding parse_finding(const std::string& raw, const std::string& module,
                            const ModuleDecl* decl = nullptr);

// Canonical single-line JSON (fixed key order).
std::string finding_to_json(const ModuleFinding& f, bool include_module = true);

// Schema description embedded into prompts.
extern const char* const kFindingSchemaText;

const char* flow_scope_name(FlowScope s);

}  // namespace iftrace
