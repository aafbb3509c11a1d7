#include "iftrace/taint.hpp"

#include <algorithm>
#include <map>

#include "iftrace/printer.hpp"

namespace iftrace {

UnknownSeedError::UnknownSeedError(const AssetSeed& seed, const std::string& why)
    : std::runtime_error("bad asset seed " + seed.module + ":" + seed.signal + ": " + why) {}

bool TaintState::is_tainted(const std::string& path, const std::string& signal) const {
  auto it = tags.find({path, signal});
  return it != tags.end() && !it->second.empty();
}

std::set<std::string> TaintState::tags_for(const std::string& path,
                                           const std::string& signal) const {
  auto it = tags.find({path, signal});
  return it == tags.end() ? std::set<std::string>{} : it->second;
}

std::vector<int> TaintState::instances_of(const std::string& module) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].module_name == module) out.push_back(static_cast<int>(i));
  return out;
}

const InstanceNode* TaintState::root_of(const std::string& module) const {
  for (const auto& inst : instances)
    if (inst.parent < 0 && inst.module_name == module) return &inst;
  return nullptr;
}

std::vector<std::pair<TaintState::Key, std::string>> TaintState::chain(
    const std::string& path, const std::string& signal) const {
  std::vector<std::pair<Key, std::string>> rev;
  Key cur{path, signal};
  std::set<Key> visited;
  while (visited.insert(cur).second) {
    auto it = provenance.find(cur);
    if (it == provenance.end()) break;
    rev.emplace_back(cur, it->second.kind);
    if (it->second.kind == "seed") break;
    cur = Key{it->second.from_path, it->second.from_signal};
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::vector<std::string> TaintState::tainted_output_ports(const std::string& top) const {
  std::vector<std::string> out;
  const InstanceNode* root = root_of(top);
  if (!root || !root->decl) return out;
  for (const auto& p : root->decl->ports) {
    if (p.dir == PortDir::In) continue;
    if (is_tainted(root->path, p.name)) out.push_back(p.name);
  }
  return out;
}

namespace {

void collect_idents(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Ident:
      out.push_back(e.name);
      break;
    case Expr::Kind::BitSelect:
      out.push_back(e.name);
      for (const Expr& c : e.operands) collect_idents(c, out);
      break;
    case Expr::Kind::PartSelect:
      out.push_back(e.name);
      break;
    default:
      for (const Expr& c : e.operands) collect_idents(c, out);
      break;
  }
}

void collect_targets(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Ident:
    case Expr::Kind::BitSelect:
    case Expr::Kind::PartSelect:
      out.push_back(e.name);
      break;
    case Expr::Kind::Concat:
      for (const Expr& c : e.operands) collect_targets(c, out);
      break;
    default:
      break;
  }
}

struct ConnInfo {
  std::string formal;
  PortDir dir = PortDir::In;
  bool dir_known = false;  // false for black-box targets
  std::vector<std::string> reads;    // identifiers in the actual
  std::vector<std::string> writes;   // lvalue targets of the actual
};

struct Engine {
  const SourceUnit& unit;
  TaintState state;
  std::vector<std::vector<ConnInfo>> conns;          // per instance node
  std::map<std::string, std::vector<DepEdge>> deps;  // per module
  bool changed = false;

  explicit Engine(const SourceUnit& u) : unit(u) {}

  // Union `from`'s tags into `to`; records the first-arrival hop.
  void flow(const TaintState::Key& from, const TaintState::Key& to,
            const std::string& kind) {
    auto src = state.tags.find(from);
    if (src == state.tags.end() || src->second.empty()) return;
    auto& dst = state.tags[to];
    bool was_empty = dst.empty();
    std::size_t before = dst.size();
    dst.insert(src->second.begin(), src->second.end());
    if (dst.size() != before) changed = true;
    if (was_empty && !dst.empty())
      state.provenance.emplace(to, TaintHop{from.first, from.second, kind});
  }

  void elaborate(const DesignGraph& g) {
    std::vector<std::string> roots;
    for (const auto& n : g.nodes)
      if (g.adjacency.at(n).empty()) roots.push_back(n);
    std::sort(roots.begin(), roots.end());
    for (const auto& r : roots) {
      const ModuleDecl* decl = unit.find_module(r);
      if (!decl) continue;
      add_instance(r, r, decl, -1, nullptr);
    }
  }

  void add_instance(const std::string& path, const std::string& module,
                    const ModuleDecl* decl, int parent, const Instance* via) {
    InstanceNode node;
    node.path = path;
    node.module_name = module;
    node.decl = decl;
    node.parent = parent;
    node.via = via;
    int idx = static_cast<int>(state.instances.size());
    state.instances.push_back(std::move(node));
    conns.emplace_back();

    if (via) {
      const ModuleDecl* target = decl;  // null for black boxes
      for (const auto& c : via->connections) {
        ConnInfo info;
        info.formal = c.formal;
        if (target) {
          if (const Port* p = target->find_port(c.formal)) {
            info.dir = p->dir;
            info.dir_known = true;
          }
        }
        if (c.actual) {
          collect_idents(*c.actual, info.reads);
          collect_targets(*c.actual, info.writes);
        }
        conns[idx].push_back(std::move(info));
      }
    }

    if (!decl) return;
    for (const auto& inst : decl->instances) {
      const ModuleDecl* child = unit.find_module(inst.module_name);
      add_instance(path + "." + inst.instance_name, inst.module_name, child,
                   idx, &inst);
    }
  }

  void run_round() {
    for (std::size_t i = 0; i < state.instances.size(); ++i) {
      const InstanceNode& node = state.instances[i];
      // Intra-module dependency edges.
      if (node.decl) {
        for (const DepEdge& e : deps[node.module_name]) {
          flow({node.path, e.from}, {node.path, e.to},
               e.kind == DepKind::Explicit ? "explicit" : "implicit");
        }
      }
      if (node.parent < 0) continue;
      const std::string& ppath = state.instances[node.parent].path;

      if (node.decl) {
        for (const ConnInfo& c : conns[i]) {
          if (!c.dir_known) continue;  // already diagnosed at parse
          if (c.dir == PortDir::In || c.dir == PortDir::InOut) {
            for (const auto& r : c.reads)
              flow({ppath, r}, {node.path, c.formal}, "port");
          }
          if (c.dir == PortDir::Out || c.dir == PortDir::InOut) {
            for (const auto& w : c.writes)
              flow({node.path, c.formal}, {ppath, w}, "port");
          }
        }
      } else {
        // Black box: every connected signal conservatively flows to every
        // other connected signal in the parent scope.
        for (const ConnInfo& from : conns[i]) {
          for (const auto& r : from.reads) {
            for (const ConnInfo& to : conns[i]) {
              for (const auto& w : to.writes) {
                if (r == w) continue;
                flow({ppath, r}, {ppath, w}, "blackbox");
              }
            }
          }
        }
      }
    }
  }
};

}  // namespace

TaintState propagate(const SourceUnit& unit, const DesignGraph& g,
                     const std::vector<AssetSeed>& seeds, TaintOptions opts,
                     const TaintState* resume) {
  for (const auto& seed : seeds) {
    const ModuleDecl* m = unit.find_module(seed.module);
    if (!m) throw UnknownSeedError(seed, "module not found");
    if (!m->declares(seed.signal)) throw UnknownSeedError(seed, "signal not declared");
  }

  Engine engine(unit);
  engine.state.unit = &unit;
  engine.state.graph = &g;
  engine.elaborate(g);
  for (const auto& m : unit.modules)
    engine.deps[m.name] = extract_dependencies(m, DepOptions{opts.include_clocks});

  if (resume) {
    engine.state.tags = resume->tags;
    engine.state.provenance = resume->provenance;
  }

  for (const auto& seed : seeds) {
    for (int idx : engine.state.instances_of(seed.module)) {
      TaintState::Key key{engine.state.instances[idx].path, seed.signal};
      auto& dst = engine.state.tags[key];
      bool was_empty = dst.empty();
      dst.insert(seed.label.empty() ? seed.signal : seed.label);
      if (was_empty)
        engine.state.provenance.emplace(key, TaintHop{"", "", "seed"});
    }
  }

  do {
    engine.changed = false;
    engine.run_round();
  } while (engine.changed);

  return std::move(engine.state);
}

ModuleFinding finding_from_taint(const std::string& module, const TaintState& state,
                                 const DesignGraph& g) {
  if (!g.has_node(module)) throw UnknownModuleError(module);
  const SourceUnit& unit = *state.unit;
  const ModuleDecl* decl = unit.find_module(module);
  if (!decl) throw UnknownModuleError(module);

  ModuleFinding f;
  f.module = module;
  std::vector<int> own = state.instances_of(module);

  auto tainted_any = [&](const std::string& signal) {
    for (int idx : own)
      if (state.is_tainted(state.instances[idx].path, signal)) return true;
    return false;
  };

  // Sensitive sources: tainted inputs plus seeds planted on this module.
  for (const auto& p : decl->ports) {
    if (p.dir == PortDir::Out) continue;
    if (tainted_any(p.name)) f.sensitive_sources.push_back(p.name);
  }
  for (int idx : own) {
    const std::string& path = state.instances[idx].path;
    for (const auto& [key, hop] : state.provenance) {
      if (hop.kind == "seed" && key.first == path) {
        if (std::find(f.sensitive_sources.begin(), f.sensitive_sources.end(), key.second) ==
            f.sensitive_sources.end())
          f.sensitive_sources.push_back(key.second);
      }
    }
  }

  for (const auto& p : decl->ports) {
    if (p.dir == PortDir::In) continue;
    if (tainted_any(p.name)) f.influenced_assets.push_back(p.name);
  }

  // Transformations: assignments that move taint.
  std::vector<DepEdge> edges = extract_dependencies(*decl);
  auto edge_active = [&](const DepEdge& e) { return tainted_any(e.from); };

  auto add_transform = [&](const Expr& lhs, const Expr& rhs, bool nonblocking) {
    std::vector<std::string> targets;
    collect_targets(lhs, targets);
    std::vector<std::string> reads;
    collect_idents(rhs, reads);
    bool target_tainted = std::any_of(targets.begin(), targets.end(), tainted_any);
    bool source_tainted = std::any_of(reads.begin(), reads.end(), tainted_any);
    if (!target_tainted || !source_tainted) return;
    std::string text = expr_to_string(lhs) + (nonblocking ? " <= " : " = ") +
                       expr_to_string(rhs);
    if (std::find(f.transformations.begin(), f.transformations.end(), text) ==
        f.transformations.end())
      f.transformations.push_back(text);
  };

  for (const auto& a : decl->assigns) add_transform(a.lhs, a.rhs, false);
  auto walk = [&](auto&& self, const std::vector<Stmt>& body) -> void {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::Blocking:
          add_transform(s.lhs, s.rhs, false);
          break;
        case Stmt::Kind::NonBlocking:
          add_transform(s.lhs, s.rhs, true);
          break;
        case Stmt::Kind::If:
          self(self, s.then_body);
          self(self, s.else_body);
          break;
        case Stmt::Kind::Case:
          for (const auto& item : s.items) self(self, item.body);
          break;
      }
    }
  };
  for (const auto& blk : decl->always_blocks) walk(walk, blk.body);

  // Internal flows along tainted dependency edges.
  for (const DepEdge& e : edges) {
    if (!edge_active(e)) continue;
    Flow fl{e.from, e.to, FlowScope::Internal};
    if (std::find(f.flows.begin(), f.flows.end(), fl) == f.flows.end())
      f.flows.push_back(fl);
  }

  // Boundary flows through the connections this module owns.
  for (int idx : own) {
    const std::string& path = state.instances[idx].path;
    for (std::size_t k = 0; k < state.instances.size(); ++k) {
      const InstanceNode& child = state.instances[k];
      if (child.parent < 0 ||
          state.instances[child.parent].path != path || !child.via)
        continue;
      for (const auto& c : child.via->connections) {
        if (c.formal.empty() || !c.actual) continue;
        PortDir dir = PortDir::In;
        bool known = false;
        if (child.decl) {
          if (const Port* p = child.decl->find_port(c.formal)) {
            dir = p->dir;
            known = true;
          }
        }
        if (!known) continue;
        std::vector<std::string> reads, writes;
        collect_idents(*c.actual, reads);
        collect_targets(*c.actual, writes);
        std::string formal_ref = child.via->instance_name + "." + c.formal;
        if ((dir == PortDir::In || dir == PortDir::InOut)) {
          for (const auto& r : reads) {
            if (!state.is_tainted(path, r)) continue;
            Flow fl{r, formal_ref, FlowScope::External};
            if (std::find(f.flows.begin(), f.flows.end(), fl) == f.flows.end())
              f.flows.push_back(fl);
          }
        }
        if ((dir == PortDir::Out || dir == PortDir::InOut) &&
            state.is_tainted(child.path, c.formal)) {
          for (const auto& w : writes) {
            Flow fl{formal_ref, w, FlowScope::External};
            if (std::find(f.flows.begin(), f.flows.end(), fl) == f.flows.end())
              f.flows.push_back(fl);
          }
        }
      }
    }
  }

  return f;
}

}  // namespace iftrace
