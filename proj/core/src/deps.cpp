#include "iftrace/deps.hpp"

#include <set>
#include <tuple>

namespace iftrace {

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

// Base identifiers written by an lvalue expression.
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

// Identifiers read by an lvalue (variable bit-select indexes).
void collect_lvalue_reads(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::BitSelect:
      for (const Expr& c : e.operands) collect_idents(c, out);
      break;
    case Expr::Kind::Concat:
      for (const Expr& c : e.operands) collect_lvalue_reads(c, out);
      break;
    default:
      break;
  }
}

struct EdgeCollector {
  const ModuleDecl& m;
  DepOptions opts;
  std::vector<DepEdge> edges;
  std::set<std::tuple<std::string, std::string, DepKind>> seen;

  void add(const std::string& from, const std::string& to, DepKind kind) {
    if (!m.declares(from) || !m.declares(to)) return;  // undeclared already diagnosed
    if (seen.emplace(from, to, kind).second) edges.push_back(DepEdge{from, to, kind});
  }

  void add_assignment(const Expr& lhs, const Expr& rhs,
                      const std::vector<std::string>& conds,
                      const std::vector<std::string>& event_sigs) {
    std::vector<std::string> targets;
    collect_targets(lhs, targets);
    std::vector<std::string> reads;
    collect_idents(rhs, reads);
    collect_lvalue_reads(lhs, reads);
    for (const auto& t : targets) {
      for (const auto& s : reads) add(s, t, DepKind::Explicit);
      for (const auto& c : conds) add(c, t, DepKind::Implicit);
      if (opts.include_clocks)
        for (const auto& e : event_sigs) add(e, t, DepKind::Implicit);
    }
  }

  void walk(const std::vector<Stmt>& body, std::vector<std::string>& conds,
            const std::vector<std::string>& event_sigs) {
    for (const Stmt& s : body) {
      switch (s.kind) {
        case Stmt::Kind::Blocking:
        case Stmt::Kind::NonBlocking:
          add_assignment(s.lhs, s.rhs, conds, event_sigs);
          break;
        case Stmt::Kind::If: {
          std::size_t mark = conds.size();
          collect_idents(s.cond, conds);
          walk(s.then_body, conds, event_sigs);
          walk(s.else_body, conds, event_sigs);
          conds.resize(mark);
          break;
        }
        case Stmt::Kind::Case: {
          std::size_t mark = conds.size();
          collect_idents(s.cond, conds);
          for (const auto& item : s.items)
            for (const auto& l : item.labels) collect_idents(l, conds);
          for (const auto& item : s.items) walk(item.body, conds, event_sigs);
          conds.resize(mark);
          break;
        }
      }
    }
  }
};

}  // namespace

std::vector<DepEdge> extract_dependencies(const ModuleDecl& m, DepOptions opts) {
  EdgeCollector c{m, opts, {}, {}};
  for (const AssignStmt& a : m.assigns) c.add_assignment(a.lhs, a.rhs, {}, {});
  for (const ProcBlock& blk : m.always_blocks) {
    std::vector<std::string> event_sigs;
    if (!blk.star)
      for (const auto& t : blk.sensitivity) event_sigs.push_back(t.signal);
    std::vector<std::string> conds;
    c.walk(blk.body, conds, event_sigs);
  }
  return std::move(c.edges);
}

HierarchyResult resolve_hierarchy(const SourceUnit& unit) {
  HierarchyResult out;
  std::set<std::string> blackboxes;
  for (const ModuleDecl& m : unit.modules) {
    for (const Instance& inst : m.instances) {
      if (unit.find_module(inst.module_name)) {
        out.links.push_back(HierarchyLink{m.name, inst.module_name, inst.instance_name});
      } else if (blackboxes.insert(inst.module_name).second) {
        out.diagnostics.push_back(Diagnostic{
            m.file, inst.line, inst.col, Severity::Warning,
            "module '" + inst.module_name + "' is not part of the unit; instance '" +
                inst.instance_name + "' treated as a black box"});
      }
    }
  }
  return out;
}

}  // namespace iftrace
