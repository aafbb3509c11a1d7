#include "iftrace/printer.hpp"

#include <sstream>

namespace iftrace {

namespace {

int node_precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ternary:
      return 0;
    case Expr::Kind::Binary:
      if (e.op == "||") return 1;
      if (e.op == "&&") return 2;
      if (e.op == "|") return 3;
      if (e.op == "^" || e.op == "~^") return 4;
      if (e.op == "&") return 5;
      if (e.op == "==" || e.op == "!=" || e.op == "===" || e.op == "!==") return 6;
      if (e.op == "<" || e.op == "<=" || e.op == ">" || e.op == ">=") return 7;
      if (e.op == "<<" || e.op == ">>" || e.op == "<<<" || e.op == ">>>") return 8;
      if (e.op == "+" || e.op == "-") return 9;
      return 10;
    case Expr::Kind::Unary:
      return 11;
    default:
      return 12;  // primaries never need parens
  }
}

void print_expr(const Expr& e, std::ostream& os);

void print_child(const Expr& child, int parent_prec, bool tighten, std::ostream& os) {
  int prec = node_precedence(child);
  bool parens = prec < parent_prec || (tighten && prec == parent_prec);
  if (parens) os << '(';
  print_expr(child, os);
  if (parens) os << ')';
}

void print_number(const Expr& e, std::ostream& os) {
  if (!e.sized) {
    os << e.value;
    return;
  }
  os << e.width << "'h" << std::hex << e.value << std::dec;
}

void print_expr(const Expr& e, std::ostream& os) {
  switch (e.kind) {
    case Expr::Kind::Number:
      print_number(e, os);
      break;
    case Expr::Kind::Ident:
      os << e.name;
      break;
    case Expr::Kind::Unary:
      os << e.op;
      print_child(e.operands[0], node_precedence(e), /*tighten=*/true, os);
      break;
    case Expr::Kind::Binary: {
      int prec = node_precedence(e);
      print_child(e.operands[0], prec, false, os);
      os << ' ' << e.op << ' ';
      print_child(e.operands[1], prec, true, os);
      break;
    }
    case Expr::Kind::Ternary:
      print_child(e.operands[0], 1, false, os);
      os << " ? ";
      print_child(e.operands[1], 1, false, os);
      os << " : ";
      print_child(e.operands[2], 0, false, os);
      break;
    case Expr::Kind::Concat: {
      os << '{';
      bool first = true;
      for (const auto& c : e.operands) {
        if (!first) os << ", ";
        first = false;
        print_expr(c, os);
      }
      os << '}';
      break;
    }
    case Expr::Kind::Replicate:
      os << '{' << e.repeat << '{';
      print_expr(e.operands[0], os);
      os << "}}";
      break;
    case Expr::Kind::BitSelect:
      os << e.name << '[';
      print_expr(e.operands[0], os);
      os << ']';
      break;
    case Expr::Kind::PartSelect:
      os << e.name << '[' << e.msb << ':' << e.lsb << ']';
      break;
  }
}

std::string range_text(int width) {
  if (width <= 1) return "";
  return "[" + std::to_string(width - 1) + ":0] ";
}

void print_stmt(const Stmt& s, std::ostream& os, int indent) {
  std::string pad(indent, ' ');
  switch (s.kind) {
    case Stmt::Kind::Blocking:
    case Stmt::Kind::NonBlocking:
      os << pad;
      print_expr(s.lhs, os);
      os << (s.kind == Stmt::Kind::Blocking ? " = " : " <= ");
      print_expr(s.rhs, os);
      os << ";\n";
      break;
    case Stmt::Kind::If:
      os << pad << "if (";
      print_expr(s.cond, os);
      os << ") begin\n";
      for (const auto& st : s.then_body) print_stmt(st, os, indent + 2);
      os << pad << "end";
      if (!s.else_body.empty()) {
        os << " else begin\n";
        for (const auto& st : s.else_body) print_stmt(st, os, indent + 2);
        os << pad << "end";
      }
      os << "\n";
      break;
    case Stmt::Kind::Case:
      os << pad << s.case_kind << " (";
      print_expr(s.cond, os);
      os << ")\n";
      for (const auto& item : s.items) {
        os << pad << "  ";
        if (item.is_default) {
          os << "default";
        } else {
          bool first = true;
          for (const auto& l : item.labels) {
            if (!first) os << ", ";
            first = false;
            print_expr(l, os);
          }
        }
        os << ": begin\n";
        for (const auto& st : item.body) print_stmt(st, os, indent + 4);
        os << pad << "  end\n";
      }
      os << pad << "endcase\n";
      break;
  }
}

}  // namespace

std::string expr_to_string(const Expr& e) {
  std::ostringstream os;
  print_expr(e, os);
  return os.str();
}

std::string print_module(const ModuleDecl& m) {
  std::ostringstream os;
  os << "module " << m.name;
  if (!m.ports.empty()) {
    os << " (\n";
    for (std::size_t i = 0; i < m.ports.size(); ++i) {
      const Port& p = m.ports[i];
      os << "  ";
      switch (p.dir) {
        case PortDir::In: os << "input "; break;
        case PortDir::Out: os << "output "; break;
        case PortDir::InOut: os << "inout "; break;
      }
      os << (p.is_reg ? "reg " : "wire ");
      if (p.is_signed) os << "signed ";
      os << range_text(p.width) << p.name;
      if (i + 1 < m.ports.size()) os << ',';
      os << '\n';
    }
    os << ")";
  }
  os << ";\n";

  for (const auto& n : m.nets) {
    os << "  " << (n.kind == NetKind::Reg ? "reg " : "wire ");
    if (n.is_signed) os << "signed ";
    os << range_text(n.width) << n.name << ";\n";
  }

  for (const auto& a : m.assigns) {
    os << "  assign ";
    print_expr(a.lhs, os);
    os << " = ";
    print_expr(a.rhs, os);
    os << ";\n";
  }

  for (const auto& inst : m.instances) {
    os << "  " << inst.module_name << ' ' << inst.instance_name << " (";
    bool first = true;
    for (const auto& c : inst.connections) {
      if (!first) os << ", ";
      first = false;
      if (!c.formal.empty()) {
        os << '.' << c.formal << '(';
        if (c.actual) print_expr(*c.actual, os);
        os << ')';
      } else if (c.actual) {
        print_expr(*c.actual, os);
      }
    }
    os << ");\n";
  }

  for (const auto& blk : m.always_blocks) {
    os << "  always @";
    if (blk.star) {
      os << "(*)";
    } else {
      os << '(';
      bool first = true;
      for (const auto& t : blk.sensitivity) {
        if (!first) os << " or ";
        first = false;
        if (t.edge == EventTerm::EdgeKind::Pos) os << "posedge ";
        if (t.edge == EventTerm::EdgeKind::Neg) os << "negedge ";
        os << t.signal;
      }
      os << ')';
    }
    os << " begin\n";
    for (const auto& st : blk.body) print_stmt(st, os, 4);
    os << "  end\n";
  }

  os << "endmodule\n";
  return os.str();
}

}  // namespace iftrace
