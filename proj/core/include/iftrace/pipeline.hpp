#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/backend.hpp"
#include "iftrace/context.hpp"
#include "iftrace/report.hpp"

namespace iftrace {

struct ModuleRunStats {
  std::string module;
  double wall_ms = 0.0;
  std::size_t prompt_chars = 0;
  std::size_t response_chars = 0;
};

struct PipelineResult {
  AnalysisContext context;
  std::vector<ModuleRunStats> stats;
};

// Unrecovered backend or schema failure, tagged with the failing module
// ("<integration>" for the design-wide step).
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string module, const std::string& what);
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// Walks the schedule; per module: formulate -> invoke -> parse -> accumulate.
// A malformed reply gets exactly one repair re-prompt before the module
// fails. The returned context holds one finding per module in order.
PipelineResult run_pipeline(const SourceUnit& unit, const DesignGraph& g,
                            const Schedule& schedule, Backend& backend,
                            const PromptTemplates& templates, AnalysisContext initial);

// Design-wide assessment over a complete context.
LeakageReport run_integration(const AnalysisContext& ctx, const DesignGraph& g,
                              Backend& backend, const PromptTemplates& templates);

// Whole design in a single prompt (baseline mode, no per-module analysis).
LeakageReport run_monolithic(const SourceUnit& unit, const AnalysisContext& ctx,
                             Backend& backend, const PromptTemplates& templates);

}  // namespace iftrace
