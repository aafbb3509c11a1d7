#include "iftrace/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace iftrace {

namespace {

std::string cycle_text(const std::vector<std::string>& cycle) {
  std::string s = "cyclic module hierarchy: ";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) s += " -> ";
    s += cycle[i];
  }
  return s;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : std::runtime_error(cycle_text(cycle)), cycle_(std::move(cycle)) {}

UnknownModuleError::UnknownModuleError(const std::string& name)
    : std::runtime_error("unknown module '" + name + "'") {}

bool DesignGraph::has_node(const std::string& n) const {
  return adjacency.count(n) > 0;
}

DesignGraph build_graph(const std::vector<HierarchyLink>& hierarchy,
                        const std::vector<std::string>& modules) {
  DesignGraph g;
  auto add_node = [&](const std::string& n) {
    if (!g.adjacency.count(n)) {
      g.nodes.push_back(n);
      g.adjacency[n];
      g.reverse_adjacency[n];
    }
  };
  for (const auto& m : modules) add_node(m);
  for (const auto& link : hierarchy) {
    add_node(link.parent);
    add_node(link.child);
    // The instantiating module depends on its child.
    if (g.edges.emplace(link.child, link.parent).second) {
      g.adjacency[link.child].push_back(link.parent);
      g.reverse_adjacency[link.parent].push_back(link.child);
    }
  }
  for (auto& [_, succ] : g.adjacency) std::sort(succ.begin(), succ.end());
  for (auto& [_, pred] : g.reverse_adjacency) std::sort(pred.begin(), pred.end());

  // Acyclicity check; report one offending cycle.
  std::map<std::string, int> indeg;
  for (const auto& n : g.nodes) indeg[n] = static_cast<int>(g.reverse_adjacency[n].size());
  std::vector<std::string> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t removed = 0;
  while (!ready.empty()) {
    std::string n = ready.back();
    ready.pop_back();
    ++removed;
    for (const auto& s : g.adjacency[n])
      if (--indeg[s] == 0) ready.push_back(s);
  }
  if (removed != g.nodes.size()) {
    // Every residual node kept a residual predecessor; walking predecessors
    // must eventually revisit a node, closing a cycle.
    std::string start;
    for (const auto& n : g.nodes) {
      if (indeg[n] > 0 && (start.empty() || n < start)) start = n;
    }
    std::vector<std::string> path;
    std::map<std::string, std::size_t> at;
    std::string cur = start;
    while (!at.count(cur)) {
      at[cur] = path.size();
      path.push_back(cur);
      for (const auto& p : g.reverse_adjacency[cur]) {
        if (indeg[p] > 0) {
          cur = p;
          break;
        }
      }
    }
    // `path` follows edges backwards; reverse for the forward cycle.
    std::vector<std::string> cycle(path.begin() + static_cast<long>(at[cur]), path.end());
    std::reverse(cycle.begin(), cycle.end());
    auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
    cycle.push_back(cycle.front());
    throw CycleError(std::move(cycle));
  }
  return g;
}

Schedule topo_sort(const DesignGraph& g) {
  Schedule s;
  std::map<std::string, int> indeg;
  for (const auto& n : g.nodes) indeg[n] = static_cast<int>(g.reverse_adjacency.at(n).size());

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push(n);

  while (!ready.empty()) {
    std::string n = ready.top();
    ready.pop();
    s.order.push_back(n);
    for (const auto& succ : g.adjacency.at(n))
      if (--indeg[succ] == 0) ready.push(succ);
  }

  // Levels: longest path to a sink, 0 where nothing depends on the module.
  for (auto it = s.order.rbegin(); it != s.order.rend(); ++it) {
    const auto& succ = g.adjacency.at(*it);
    int lvl = 0;
    for (const auto& x : succ) lvl = std::max(lvl, s.levels.at(x) + 1);
    s.levels[*it] = lvl;
  }
  return s;
}

namespace {

std::vector<std::string> transitive(const DesignGraph& g, const std::string& m,
                                    const std::map<std::string, std::vector<std::string>>&
                                        next) {
  if (!g.has_node(m)) throw UnknownModuleError(m);
  std::set<std::string> reached;
  std::vector<std::string> frontier{m};
  while (!frontier.empty()) {
    std::string cur = frontier.back();
    frontier.pop_back();
    for (const auto& n : next.at(cur)) {
      if (reached.insert(n).second) frontier.push_back(n);
    }
  }
  reached.erase(m);
  Schedule s = topo_sort(g);
  std::vector<std::string> out;
  for (const auto& n : s.order)
    if (reached.count(n)) out.push_back(n);
  return out;
}

}  // namespace

std::vector<std::string> ancestors(const DesignGraph& g, const std::string& m) {
  return transitive(g, m, g.reverse_adjacency);
}

std::vector<std::string> dependents(const DesignGraph& g, const std::string& m) {
  return transitive(g, m, g.adjacency);
}

std::string graph_to_dot(const DesignGraph& g, const Schedule& s) {
  std::ostringstream os;
  os << "digraph design_hierarchy {\n";
  for (const auto& n : s.order)
    os << "  \"" << n << "\" [label=\"" << n << " (L=" << s.levels.at(n) << ")\"];\n";
  for (const auto& [from, to] : g.edges) os << "  \"" << from << "\" -> \"" << to << "\";\n";
  os << "}\n";
  return os.str();
}

std::string graph_to_json(const DesignGraph& g, const Schedule& s) {
  nlohmann::ordered_json j;
  j["nodes"] = s.order;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [from, to] : g.edges) edges.push_back({from, to});
  j["edges"] = std::move(edges);
  j["order"] = s.order;
  auto levels = nlohmann::ordered_json::object();
  for (const auto& n : s.order) levels[n] = s.levels.at(n);
  j["levels"] = std::move(levels);
  return j.dump(2) + "\n";
}

}  // namespace iftrace
