#include "iftrace/oracle.hpp"

#include <map>
#include <vector>

#include "iftrace/eval.hpp"

namespace iftrace {

OracleScopeExceeded::OracleScopeExceeded(const std::string& why)
    : std::runtime_error("influence oracle: " + why) {}

namespace {

using Values = std::map<std::string, uint64_t>;

// Writes an evaluated value through an lvalue expression.
bool write_lvalue(const Expr& lhs, uint64_t value, const ModuleDecl& m, Values& values) {
  switch (lhs.kind) {
    case Expr::Kind::Ident: {
      uint64_t masked = value & mask_for_width(m.width_of(lhs.name));
      uint64_t& slot = values[lhs.name];
      if (slot == masked) return false;
      slot = masked;
      return true;
    }
    case Expr::Kind::BitSelect: {
      uint64_t idx = eval_expr(lhs.operands[0], m, values);
      int w = m.width_of(lhs.name);
      if (idx >= static_cast<uint64_t>(w) || idx >= 64) return false;
      uint64_t& slot = values[lhs.name];
      uint64_t updated = (slot & ~(uint64_t{1} << idx)) | ((value & 1) << idx);
      if (slot == updated) return false;
      slot = updated;
      return true;
    }
    case Expr::Kind::PartSelect: {
      int w = lhs.msb - lhs.lsb + 1;
      int lo = lhs.lsb;
      if (lo >= 64) return false;
      uint64_t msk = mask_for_width(w) << lo;
      uint64_t& slot = values[lhs.name];
      uint64_t updated = (slot & ~msk) | ((value << lo) & msk);
      updated &= mask_for_width(m.width_of(lhs.name));
      if (slot == updated) return false;
      slot = updated;
      return true;
    }
    case Expr::Kind::Concat: {
      // Members receive slices msb-first.
      int total = 0;
      std::vector<int> widths;
      for (const auto& c : lhs.operands) {
        int w = infer_width(c, m);
        widths.push_back(w);
        total += w;
      }
      bool changed = false;
      int consumed = 0;
      for (std::size_t i = 0; i < lhs.operands.size(); ++i) {
        consumed += widths[i];
        int shift = total - consumed;
        uint64_t part = shift >= 64 ? 0 : (value >> shift) & mask_for_width(widths[i]);
        changed |= write_lvalue(lhs.operands[i], part, m, values);
      }
      return changed;
    }
    default:
      return false;
  }
}

bool exec_stmts(const std::vector<Stmt>& body, const ModuleDecl& m, Values& values) {
  bool changed = false;
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Blocking:
      case Stmt::Kind::NonBlocking:
        changed |= write_lvalue(s.lhs, eval_expr(s.rhs, m, values), m, values);
        break;
      case Stmt::Kind::If:
        if (eval_expr(s.cond, m, values) != 0)
          changed |= exec_stmts(s.then_body, m, values);
        else
          changed |= exec_stmts(s.else_body, m, values);
        break;
      case Stmt::Kind::Case: {
        uint64_t subject = eval_expr(s.cond, m, values);
        const Stmt::CaseItem* hit = nullptr;
        const Stmt::CaseItem* def = nullptr;
        for (const auto& item : s.items) {
          if (item.is_default) {
            def = &item;
            continue;
          }
          for (const auto& l : item.labels) {
            if (eval_expr(l, m, values) == subject) {
              hit = &item;
              break;
            }
          }
          if (hit) break;
        }
        if (!hit) hit = def;
        if (hit) changed |= exec_stmts(hit->body, m, values);
        break;
      }
    }
  }
  return changed;
}

// Settles the module for one input assignment; procedural targets start at 0.
Values settle(const ModuleDecl& m, const Values& inputs) {
  Values values = inputs;
  int limit = static_cast<int>(m.nets.size() + m.ports.size()) + 4;
  for (int pass = 0; pass < limit; ++pass) {
    bool changed = false;
    for (const auto& a : m.assigns)
      changed |= write_lvalue(a.lhs, eval_expr(a.rhs, m, values), m, values);
    for (const auto& blk : m.always_blocks) changed |= exec_stmts(blk.body, m, values);
    if (!changed) return values;
  }
  throw OracleScopeExceeded("module '" + m.name + "' did not settle (combinational loop?)");
}

}  // namespace

std::set<std::string> influence_oracle(const ModuleDecl& m, const std::string& seed_signal) {
  if (!m.instances.empty())
    throw OracleScopeExceeded("module '" + m.name + "' contains instances");
  for (const auto& blk : m.always_blocks) {
    for (const auto& t : blk.sensitivity) {
      if (t.edge != EventTerm::EdgeKind::Level)
        throw OracleScopeExceeded("module '" + m.name + "' has edge-triggered state");
    }
  }

  std::vector<const Port*> inputs;
  int total_bits = 0;
  for (const auto& p : m.ports) {
    if (p.dir == PortDir::In) {
      inputs.push_back(&p);
      total_bits += p.width;
    } else if (p.dir == PortDir::InOut) {
      throw OracleScopeExceeded("inout port '" + p.name + "'");
    }
  }
  if (total_bits > 16)
    throw OracleScopeExceeded("total input width " + std::to_string(total_bits) +
                              " exceeds 16 bits");

  const Port* seed = nullptr;
  for (const Port* p : inputs)
    if (p->name == seed_signal) seed = p;
  if (!seed) throw OracleScopeExceeded("seed '" + seed_signal + "' is not an input port");

  // Signals under observation: everything except input ports.
  std::vector<std::string> watched;
  for (const auto& p : m.ports)
    if (p.dir != PortDir::In) watched.push_back(p.name);
  for (const auto& n : m.nets) watched.push_back(n.name);

  int rest_bits = total_bits - seed->width;
  std::set<std::string> influenced;

  for (uint64_t rest = 0; rest < (uint64_t{1} << rest_bits); ++rest) {
    // Distribute `rest` bits over the non-seed inputs.
    Values base;
    uint64_t cursor = rest;
    for (const Port* p : inputs) {
      if (p == seed) continue;
      base[p->name] = cursor & mask_for_width(p->width);
      cursor >>= p->width;
    }

    bool first = true;
    Values reference;
    for (uint64_t sv = 0; sv < (uint64_t{1} << seed->width); ++sv) {
      Values in = base;
      in[seed->name] = sv;
      Values out = settle(m, in);
      if (first) {
        reference = out;
        first = false;
        continue;
      }
      for (const auto& w : watched) {
        auto a = reference.find(w);
        auto b = out.find(w);
        uint64_t va = a == reference.end() ? 0 : a->second;
        uint64_t vb = b == out.end() ? 0 : b->second;
        if (va != vb) influenced.insert(w);
      }
    }
  }
  return influenced;
}

}  // namespace iftrace
