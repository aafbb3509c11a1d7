#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "iftrace/ast.hpp"

namespace iftrace {

// Folds an expression made of numbers and arithmetic; nullopt when any
// non-constant node appears.
std::optional<int64_t> const_eval(const Expr& e);

// Pragmatic width inference over declared signal widths.
int infer_width(const Expr& e, const ModuleDecl& m);

// Two-state evaluation: x/z read as 0, unknown signals read as 0, division
// by zero yields 0. Results are masked to the inferred width of each node.
uint64_t eval_expr(const Expr& e, const ModuleDecl& m,
                   const std::map<std::string, uint64_t>& values);

uint64_t mask_for_width(int width);

}  // namespace iftrace
