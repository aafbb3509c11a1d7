#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace iftrace {

enum class TokKind { Ident, Number, String, SystemId, Symbol, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;
  int line = 1;
  int col = 1;
  std::size_t offset = 0;  // byte offset into the source text
  std::size_t length = 0;  // raw length in the source text
};

// Throws ParseError on stray characters and UnsupportedConstruct on compiler
// directives. Attribute instances (* ... *) are skipped like comments.
std::vector<Token> tokenize(const std::string& text, const std::string& path);

}  // namespace iftrace
