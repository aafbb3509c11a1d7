#include "iftrace/ast.hpp"

namespace iftrace {

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "error";
}

std::string to_string(const Diagnostic& d) {
  return d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.col) + ": " +
         severity_name(d.severity) + ": " + d.message;
}

Expr Expr::number(uint64_t v, int w, bool sized_literal) {
  Expr e;
  e.kind = Kind::Number;
  e.value = v;
  e.width = w;
  e.sized = sized_literal;
  return e;
}

Expr Expr::ident(std::string n) {
  Expr e;
  e.kind = Kind::Ident;
  e.name = std::move(n);
  return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number:
      if (a.value != b.value || a.width != b.width || a.sized != b.sized) return false;
      break;
    case Expr::Kind::Ident:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
    case Expr::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Expr::Kind::Ternary:
    case Expr::Kind::Concat:
      break;
    case Expr::Kind::Replicate:
      if (a.repeat != b.repeat) return false;
      break;
    case Expr::Kind::BitSelect:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::PartSelect:
      if (a.name != b.name || a.msb != b.msb || a.lsb != b.lsb) return false;
      break;
  }
  if (a.operands.size() != b.operands.size()) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!structurally_equal(a.operands[i], b.operands[i])) return false;
  return true;
}

namespace {

bool equal(const Port& a, const Port& b) {
  return a.name == b.name && a.dir == b.dir && a.width == b.width && a.is_reg == b.is_reg &&
         a.is_signed == b.is_signed;
}

bool equal(const NetDecl& a, const NetDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.width == b.width &&
         a.is_signed == b.is_signed;
}

bool equal(const AssignStmt& a, const AssignStmt& b) {
  return structurally_equal(a.lhs, b.lhs) && structurally_equal(a.rhs, b.rhs);
}

bool equal(const Stmt& a, const Stmt& b);

bool equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  if (!structurally_equal(a.lhs, b.lhs) || !structurally_equal(a.rhs, b.rhs) ||
      !structurally_equal(a.cond, b.cond))
    return false;
  if (a.case_kind != b.case_kind) return false;
  if (!equal(a.then_body, b.then_body) || !equal(a.else_body, b.else_body)) return false;
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.is_default != y.is_default) return false;
    if (x.labels.size() != y.labels.size()) return false;
    for (std::size_t k = 0; k < x.labels.size(); ++k)
      if (!structurally_equal(x.labels[k], y.labels[k])) return false;
    if (!equal(x.body, y.body)) return false;
  }
  return true;
}

bool equal(const ProcBlock& a, const ProcBlock& b) {
  if (a.star != b.star) return false;
  if (a.sensitivity.size() != b.sensitivity.size()) return false;
  for (std::size_t i = 0; i < a.sensitivity.size(); ++i) {
    if (a.sensitivity[i].edge != b.sensitivity[i].edge ||
        a.sensitivity[i].signal != b.sensitivity[i].signal)
      return false;
  }
  return equal(a.body, b.body);
}

bool equal(const Connection& a, const Connection& b) {
  if (a.formal != b.formal) return false;
  if (a.actual.has_value() != b.actual.has_value()) return false;
  if (a.actual && !structurally_equal(*a.actual, *b.actual)) return false;
  return true;
}

bool equal(const Instance& a, const Instance& b) {
  if (a.module_name != b.module_name || a.instance_name != b.instance_name) return false;
  if (a.connections.size() != b.connections.size()) return false;
  for (std::size_t i = 0; i < a.connections.size(); ++i)
    if (!equal(a.connections[i], b.connections[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const ModuleDecl& a, const ModuleDecl& b) {
  if (a.name != b.name) return false;
  if (a.ports.size() != b.ports.size() || a.nets.size() != b.nets.size() ||
      a.assigns.size() != b.assigns.size() ||
      a.always_blocks.size() != b.always_blocks.size() ||
      a.instances.size() != b.instances.size())
    return false;
  for (std::size_t i = 0; i < a.ports.size(); ++i)
    if (!equal(a.ports[i], b.ports[i])) return false;
  for (std::size_t i = 0; i < a.nets.size(); ++i)
    if (!equal(a.nets[i], b.nets[i])) return false;
  for (std::size_t i = 0; i < a.assigns.size(); ++i)
    if (!equal(a.assigns[i], b.assigns[i])) return false;
  for (std::size_t i = 0; i < a.always_blocks.size(); ++i)
    if (!equal(a.always_blocks[i], b.always_blocks[i])) return false;
  for (std::size_t i = 0; i < a.instances.size(); ++i)
    if (!equal(a.instances[i], b.instances[i])) return false;
  return true;
}

const Port* ModuleDecl::find_port(const std::string& n) const {
  for (const auto& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const NetDecl* ModuleDecl::find_net(const std::string& n) const {
  for (const auto& x : nets)
    if (x.name == n) return &x;
  return nullptr;
}

bool ModuleDecl::declares(const std::string& n) const {
  return find_port(n) != nullptr || find_net(n) != nullptr;
}

int ModuleDecl::width_of(const std::string& n) const {
  if (const Port* p = find_port(n)) return p->width;
  if (const NetDecl* x = find_net(n)) return x->width;
  return 0;
}

const ModuleDecl* SourceUnit::find_module(const std::string& n) const {
  for (const auto& m : modules)
    if (m.name == n) return &m;
  return nullptr;
}

std::vector<std::string> SourceUnit::module_names() const {
  std::vector<std::string> out;
  out.reserve(modules.size());
  for (const auto& m : modules) out.push_back(m.name);
  return out;
}

}  // namespace iftrace
