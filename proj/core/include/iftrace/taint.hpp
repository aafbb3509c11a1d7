#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iftrace/deps.hpp"
#include "iftrace/finding.hpp"
#include "iftrace/graph.hpp"

namespace iftrace {

// A security-critical signal to start tracking from.
struct AssetSeed {
  std::string module;
  std::string signal;
  std::string label;  // free-form asset tag, e.g. "key"
};

class UnknownSeedError : public std::runtime_error {
 public:
  explicit UnknownSeedError(const AssetSeed& seed, const std::string& why);
};

// One step of taint propagation: how (path, signal) first became tainted.
// kind: "seed" | "explicit" | "implicit" | "port" | "blackbox".
struct TaintHop {
  std::string from_path;
  std::string from_signal;
  std::string kind;
};

struct InstanceNode {
  std::string path;         // root module name, then dot-joined instance names
  std::string module_name;
  const ModuleDecl* decl = nullptr;  // null for black boxes
  int parent = -1;                   // index into TaintState::instances
  const Instance* via = nullptr;     // instantiation site in the parent
};

struct TaintOptions {
  bool include_clocks = false;
};

class TaintState {
 public:
  using Key = std::pair<std::string, std::string>;  // (instance path, signal)

  std::map<Key, std::set<std::string>> tags;
  std::map<Key, TaintHop> provenance;  // first taint arrival per signal
  std::vector<InstanceNode> instances;
  const SourceUnit* unit = nullptr;
  const DesignGraph* graph = nullptr;

  bool is_tainted(const std::string& path, const std::string& signal) const;
  std::set<std::string> tags_for(const std::string& path, const std::string& signal) const;

  // Instance indexes elaborated from the given module, elaboration order.
  std::vector<int> instances_of(const std::string& module) const;
  const InstanceNode* root_of(const std::string& module) const;

  // Provenance chain from the seed origin to (path, signal):
  // [(key, hop kind), ...] with the first element carrying kind "seed".
  std::vector<std::pair<Key, std::string>> chain(const std::string& path,
                                                 const std::string& signal) const;

  // Tainted output/inout ports of the root instance of `top`, port order.
  std::vector<std::string> tainted_output_ports(const std::string& top) const;
};

// Net-level taint propagation to a least fixpoint: dependency edges copy
// tags within a module, instance connections copy them across module
// boundaries per port direction, black boxes copy conservatively from every
// connection to every connection. Pass `resume` to continue from a prior
// state (propagation is idempotent at the fixpoint).
TaintState propagate(const SourceUnit& unit, const DesignGraph& g,
                     const std::vector<AssetSeed>& seeds, TaintOptions opts = {},
                     const TaintState* resume = nullptr);

// Adapts taint results for one module to the structured finding schema.
ModuleFinding finding_from_taint(const std::string& module, const TaintState& state,
                                 const DesignGraph& g);

}  // namespace iftrace
