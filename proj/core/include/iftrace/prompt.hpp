#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/context.hpp"
#include "iftrace/graph.hpp"

namespace iftrace {

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::string expected_schema;  // "finding" | "report"
  std::string subject;          // module under analysis; empty for design-wide prompts
};

struct PromptTemplates {
  std::string system;
  std::string module_prompt;
  std::string final_prompt;
  std::string monolithic_prompt;
  std::string repair_prompt;
  std::vector<Technique> techniques;
};

class TemplateError : public std::runtime_error {
 public:
  explicit TemplateError(const std::string& what);
};

class MissingAncestorFinding : public std::runtime_error {
 public:
  MissingAncestorFinding(const std::string& module, const std::string& ancestor);
};

class IncompleteContext : public std::runtime_error {
 public:
  explicit IncompleteContext(const std::string& missing_module);
};

// Loads template files and the named technique definitions from `dir`
// (techniques under dir/techniques/<name>.txt with '-' mapped to '_').
PromptTemplates load_templates(const std::string& dir,
                               const std::vector<std::string>& technique_names);

// {{placeholder}} substitution; unknown placeholders are left untouched.
std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars);

// Deterministic per-module prompt: module source, ancestors, dependents,
// technique definitions, and ancestor findings serialized most-recent-last
// (oldest elided first under the context budget). The very first prompt of a
// run also carries the schedule and adjacency overview.
PromptBundle formulate_module_prompt(const ModuleDecl& decl, const AnalysisContext& ctx,
                                     const DesignGraph& g, const PromptTemplates& templates);

// Design-wide integration prompt over the complete context.
PromptBundle formulate_final_prompt(const AnalysisContext& ctx, const DesignGraph& g,
                                    const PromptTemplates& templates);

// Whole-design single prompt (no per-module breakdown).
PromptBundle formulate_monolithic_prompt(const SourceUnit& unit, const AnalysisContext& ctx,
                                         const PromptTemplates& templates);

// One-shot re-prompt after a malformed reply.
PromptBundle formulate_repair_prompt(const PromptBundle& failed, const std::string& failure,
                                     const std::string& raw_reply,
                                     const PromptTemplates& templates);

}  // namespace iftrace
