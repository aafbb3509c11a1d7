#pragma once

#include <string>

#include "iftrace/ast.hpp"

namespace iftrace {

// Debug pretty-printer. Emits canonical formatting, not the original text;
// re-parsing the output yields a structurally equal module.
std::string print_module(const ModuleDecl& m);

std::string expr_to_string(const Expr& e);

}  // namespace iftrace
