#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iftrace/ast.hpp"

namespace iftrace {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int col, const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string file_;
  int line_;
  int col_;
};

// A construct outside the supported subset (generate, functions, tasks,
// delays, memories, parameter overrides, ...).
class UnsupportedConstruct : public ParseError {
 public:
  UnsupportedConstruct(std::string file, int line, int col, std::string construct);
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

struct ParseResult {
  std::vector<ModuleDecl> modules;
  std::vector<Diagnostic> diagnostics;
};

// Parses every module in `text`. Positional instance connections are
// normalized to named form when the target module is declared in the same
// text; leftovers are flagged in diagnostics. Throws ParseError /
// UnsupportedConstruct on malformed or out-of-subset input.
ParseResult parse_source(const std::string& text, const std::string& path);

// Assembles a multi-file unit: parses each (path, text) pair, checks module
// name uniqueness, and re-runs positional normalization across files.
SourceUnit make_unit(const std::vector<std::pair<std::string, std::string>>& files);

// make_unit over on-disk files.
SourceUnit load_unit(const std::vector<std::string>& paths);

// Modules never instantiated by another module of the unit (top candidates).
std::vector<std::string> root_modules(const SourceUnit& unit);

}  // namespace iftrace
