#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "iftrace/finding.hpp"

namespace iftrace {

struct Technique {
  std::string name;        // e.g. "net-level", "gate-level"
  std::string definition;  // text injected into prompts
};

// Accumulated analysis context: findings of already-analyzed modules in
// schedule order, plus the tracking-technique definitions.
struct AnalysisContext {
  std::vector<ModuleFinding> findings;
  std::vector<Technique> techniques;
  std::size_t budget_chars = 24000;  // max serialized-finding characters per prompt

  const ModuleFinding* find(const std::string& module) const;
};

}  // namespace iftrace
