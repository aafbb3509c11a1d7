#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iftrace/deps.hpp"

namespace iftrace {

class CycleError : public std::runtime_error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  // Offending cycle as a module sequence, first node repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class UnknownModuleError : public std::runtime_error {
 public:
  explicit UnknownModuleError(const std::string& name);
};

// Design dependency DAG. Edge (from, to) means `to` depends on `from`,
// i.e. `to` instantiates `from`; adjacency lists successors.
struct DesignGraph {
  std::vector<std::string> nodes;  // insertion order
  std::set<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<std::string>> adjacency;          // sorted
  std::map<std::string, std::vector<std::string>> reverse_adjacency;  // sorted

  bool has_node(const std::string& n) const;
};

struct Schedule {
  std::vector<std::string> order;      // every dependency precedes its dependents
  std::map<std::string, int> levels;   // longest path to a sink; 0 at top modules
};

// Edges run child -> parent (the instantiating module depends on what it
// instantiates). Duplicate instantiations collapse; `modules` supplies
// isolated nodes. Throws CycleError on mutually recursive instantiation.
DesignGraph build_graph(const std::vector<HierarchyLink>& hierarchy,
                        const std::vector<std::string>& modules);

// Deterministic Kahn order, lexicographic tie-break.
Schedule topo_sort(const DesignGraph& g);

// Transitive predecessors of m (modules that influence it), in topo order.
std::vector<std::string> ancestors(const DesignGraph& g, const std::string& m);

// Transitive successors of m (modules it influences), in topo order.
std::vector<std::string> dependents(const DesignGraph& g, const std::string& m);

std::string graph_to_dot(const DesignGraph& g, const Schedule& s);
std::string graph_to_json(const DesignGraph& g, const Schedule& s);

}  // namespace iftrace
