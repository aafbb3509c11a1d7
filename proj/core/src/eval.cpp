#include "iftrace/eval.hpp"

#include <algorithm>
#include <bit>

namespace iftrace {

namespace {

int declared_lsb(const ModuleDecl& m, const std::string& name) {
  if (const Port* p = m.find_port(name)) return p->lsb;
  if (const NetDecl* n = m.find_net(name)) return n->lsb;
  return 0;
}

}  // namespace

uint64_t mask_for_width(int width) {
  if (width <= 0) return 0;
  if (width >= 64) return ~uint64_t{0};
  return (uint64_t{1} << width) - 1;
}

std::optional<int64_t> const_eval(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return static_cast<int64_t>(e.value);
    case Expr::Kind::Unary: {
      auto v = const_eval(e.operands[0]);
      if (!v) return std::nullopt;
      if (e.op == "-") return -*v;
      if (e.op == "+") return *v;
      if (e.op == "~") return ~*v;
      if (e.op == "!") return *v == 0 ? 1 : 0;
      return std::nullopt;
    }
    case Expr::Kind::Binary: {
      auto l = const_eval(e.operands[0]);
      auto r = const_eval(e.operands[1]);
      if (!l || !r) return std::nullopt;
      if (e.op == "+") return *l + *r;
      if (e.op == "-") return *l - *r;
      if (e.op == "*") return *l * *r;
      if (e.op == "/") return *r == 0 ? std::optional<int64_t>{} : *l / *r;
      if (e.op == "%") return *r == 0 ? std::optional<int64_t>{} : *l % *r;
      if (e.op == "<<") return *l << *r;
      if (e.op == ">>") return *l >> *r;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

int infer_width(const Expr& e, const ModuleDecl& m) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return std::min(e.width, 64);
    case Expr::Kind::Ident: {
      int w = m.width_of(e.name);
      return w > 0 ? std::min(w, 64) : 32;
    }
    case Expr::Kind::Unary:
      if (e.op == "!" || e.op == "&" || e.op == "|" || e.op == "^" || e.op == "~&" ||
          e.op == "~|" || e.op == "~^")
        return 1;
      return infer_width(e.operands[0], m);
    case Expr::Kind::Binary: {
      const std::string& op = e.op;
      if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" ||
          op == "<=" || op == ">" || op == ">=" || op == "&&" || op == "||")
        return 1;
      if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>")
        return infer_width(e.operands[0], m);
      return std::max(infer_width(e.operands[0], m), infer_width(e.operands[1], m));
    }
    case Expr::Kind::Ternary:
      return std::max(infer_width(e.operands[1], m), infer_width(e.operands[2], m));
    case Expr::Kind::Concat: {
      int w = 0;
      for (const auto& c : e.operands) w += infer_width(c, m);
      return std::min(w, 64);
    }
    case Expr::Kind::Replicate:
      return std::min(e.repeat * infer_width(e.operands[0], m), 64);
    case Expr::Kind::BitSelect:
      return 1;
    case Expr::Kind::PartSelect:
      return std::min(e.msb - e.lsb + 1, 64);
  }
  return 32;
}

uint64_t eval_expr(const Expr& e, const ModuleDecl& m,
                   const std::map<std::string, uint64_t>& values) {
  auto mask_self = [&](uint64_t v) { return v & mask_for_width(infer_width(e, m)); };
  switch (e.kind) {
    case Expr::Kind::Number:
      return mask_self(e.value);
    case Expr::Kind::Ident: {
      auto it = values.find(e.name);
      return mask_self(it == values.end() ? 0 : it->second);
    }
    case Expr::Kind::Unary: {
      const Expr& x = e.operands[0];
      uint64_t v = eval_expr(x, m, values);
      int w = infer_width(x, m);
      if (e.op == "!") return v == 0 ? 1 : 0;
      if (e.op == "~") return ~v & mask_for_width(w);
      if (e.op == "-") return (~v + 1) & mask_for_width(w);
      if (e.op == "+") return v;
      if (e.op == "&") return v == mask_for_width(w) ? 1 : 0;
      if (e.op == "~&") return v == mask_for_width(w) ? 0 : 1;
      if (e.op == "|") return v != 0 ? 1 : 0;
      if (e.op == "~|") return v != 0 ? 0 : 1;
      if (e.op == "^" || e.op == "~^") {
        int ones = std::popcount(v);
        int parity = ones & 1;
        return e.op == "^" ? static_cast<uint64_t>(parity)
                           : static_cast<uint64_t>(parity ^ 1);
      }
      return 0;
    }
    case Expr::Kind::Binary: {
      const std::string& op = e.op;
      if (op == "&&" || op == "||") {
        bool l = eval_expr(e.operands[0], m, values) != 0;
        bool r = eval_expr(e.operands[1], m, values) != 0;
        return op == "&&" ? (l && r) : (l || r);
      }
      uint64_t l = eval_expr(e.operands[0], m, values);
      uint64_t r = eval_expr(e.operands[1], m, values);
      if (op == "==" || op == "===") return l == r;
      if (op == "!=" || op == "!==") return l != r;
      if (op == "<") return l < r;
      if (op == "<=") return l <= r;
      if (op == ">") return l > r;
      if (op == ">=") return l >= r;
      if (op == "<<" || op == "<<<") {
        uint64_t v = r >= 64 ? 0 : l << r;
        return v & mask_for_width(infer_width(e.operands[0], m));
      }
      if (op == ">>" || op == ">>>") return r >= 64 ? 0 : l >> r;
      int w = std::max(infer_width(e.operands[0], m), infer_width(e.operands[1], m));
      uint64_t msk = mask_for_width(w);
      if (op == "+") return (l + r) & msk;
      if (op == "-") return (l - r) & msk;
      if (op == "*") return (l * r) & msk;
      if (op == "/") return r == 0 ? 0 : (l / r) & msk;
      if (op == "%") return r == 0 ? 0 : (l % r) & msk;
      if (op == "&") return l & r;
      if (op == "|") return l | r;
      if (op == "^") return l ^ r;
      if (op == "~^") return ~(l ^ r) & msk;
      return 0;
    }
    case Expr::Kind::Ternary:
      return eval_expr(e.operands[0], m, values) != 0
                 ? eval_expr(e.operands[1], m, values)
                 : eval_expr(e.operands[2], m, values);
    case Expr::Kind::Concat: {
      uint64_t acc = 0;
      for (const auto& c : e.operands) {
        int w = infer_width(c, m);
        acc = (w >= 64 ? 0 : acc << w) | (eval_expr(c, m, values) & mask_for_width(w));
      }
      return acc;
    }
    case Expr::Kind::Replicate: {
      uint64_t member = eval_expr(e.operands[0], m, values);
      int w = infer_width(e.operands[0], m);
      uint64_t acc = 0;
      for (int i = 0; i < e.repeat; ++i)
        acc = (w >= 64 ? 0 : acc << w) | (member & mask_for_width(w));
      return acc;
    }
    case Expr::Kind::BitSelect: {
      auto it = values.find(e.name);
      uint64_t base = it == values.end() ? 0 : it->second;
      int64_t idx = static_cast<int64_t>(eval_expr(e.operands[0], m, values)) -
                    declared_lsb(m, e.name);
      int w = m.width_of(e.name);
      if (idx < 0 || (w > 0 && idx >= w) || idx >= 64) return 0;
      return (base >> idx) & 1;
    }
    case Expr::Kind::PartSelect: {
      auto it = values.find(e.name);
      uint64_t base = it == values.end() ? 0 : it->second;
      int lo = e.lsb - declared_lsb(m, e.name);
      int w = e.msb - e.lsb + 1;
      if (lo < 0 || lo >= 64) return 0;
      return (base >> lo) & mask_for_width(w);
    }
  }
  return 0;
}

}  // namespace iftrace
