#pragma once

#include <string>
#include <vector>

#include "iftrace/ast.hpp"

namespace iftrace {

enum class DepKind { Explicit, Implicit };

// Intra-module signal dependency: `to` is computed from (explicit) or gated
// by (implicit) `from`. Both endpoints are declared signals of the module.
struct DepEdge {
  std::string from;
  std::string to;
  DepKind kind = DepKind::Explicit;

  bool operator==(const DepEdge&) const = default;
};

struct DepOptions {
  // When set, signals that appear in edge-triggered event controls are added
  // as implicit sources of every target assigned in that block. Off by
  // default: taint through clocks floods every register.
  bool include_clocks = false;
};

std::vector<DepEdge> extract_dependencies(const ModuleDecl& m, DepOptions opts = {});

struct HierarchyLink {
  std::string parent;
  std::string child;
  std::string instance;

  bool operator==(const HierarchyLink&) const = default;
};

struct HierarchyResult {
  std::vector<HierarchyLink> links;        // resolved instantiations only
  std::vector<Diagnostic> diagnostics;     // black boxes noted here
};

// One link per instance whose target module resolves within the unit, in
// file order then declaration order. Unresolved targets become black-box
// diagnostics, not failures.
HierarchyResult resolve_hierarchy(const SourceUnit& unit);

}  // namespace iftrace
