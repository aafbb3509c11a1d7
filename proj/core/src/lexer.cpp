#include "lexer.hpp"

#include <array>
#include <cctype>
#include <string_view>

#include "iftrace/parser.hpp"

namespace iftrace {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_base_char(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'b':
    case 'o':
    case 'd':
    case 'h':
      return true;
    default:
      return false;
  }
}

bool is_number_digit(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Longest-match symbol table.
constexpr std::array<std::string_view, 18> kMultiSymbols = {
    "<<<", ">>>", "===", "!==", "<=", ">=", "==", "!=", "&&",
    "||",  "<<",  ">>",  "~&",  "~|", "~^", "^~", "+:", "-:",
};

constexpr std::string_view kSingleSymbols = "(){}[];:,.#@?=+-*/%<>!~&|^";

}  // namespace

std::vector<Token> tokenize(const std::string& text, const std::string& path) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  auto push = [&](TokKind kind, std::string value, int tl, int tc, std::size_t off,
                  std::size_t len) {
    tokens.push_back(Token{kind, std::move(value), tl, tc, off, len});
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }

    // Comments.
    if (c == '/' && i + 1 < text.size()) {
      if (text[i + 1] == '/') {
        while (i < text.size() && text[i] != '\n') advance(1);
        continue;
      }
      if (text[i + 1] == '*') {
        int sl = line, sc = col;
        advance(2);
        for (;;) {
          if (i + 1 >= text.size())
            throw ParseError(path, sl, sc, "unterminated block comment");
          if (text[i] == '*' && text[i + 1] == '/') {
            advance(2);
            break;
          }
          advance(1);
        }
        continue;
      }
    }

    // Attribute instance (* ... *), distinguished from the "(*)" of @(*) by
    // looking at the first non-space character after "(*".
    if (c == '(' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t look = i + 2;
      while (look < text.size() && (text[look] == ' ' || text[look] == '\t')) ++look;
      if (look < text.size() && text[look] != ')') {
        int sl = line, sc = col;
        advance(2);
        for (;;) {
          if (i + 1 >= text.size())
            throw ParseError(path, sl, sc, "unterminated attribute instance");
          if (text[i] == '*' && text[i + 1] == ')') {
            advance(2);
            break;
          }
          advance(1);
        }
        continue;
      }
    }

    if (c == '`') {
      std::size_t j = i + 1;
      std::string name;
      while (j < text.size() && is_ident_char(text[j])) name.push_back(text[j++]);
      throw UnsupportedConstruct(path, line, col, "compiler directive `" + name);
    }

    if (c == '$' && i + 1 < text.size() && is_ident_start(text[i + 1])) {
      int tl = line, tc = col;
      std::size_t off = i;
      std::string name = "$";
      advance(1);
      while (i < text.size() && is_ident_char(text[i])) {
        name.push_back(text[i]);
        advance(1);
      }
      push(TokKind::SystemId, std::move(name), tl, tc, off, i - off);
      continue;
    }

    if (is_ident_start(c)) {
      int tl = line, tc = col;
      std::size_t off = i;
      std::string name;
      while (i < text.size() && is_ident_char(text[i])) {
        name.push_back(text[i]);
        advance(1);
      }
      push(TokKind::Ident, std::move(name), tl, tc, off, i - off);
      continue;
    }

    // Numbers: plain decimal, optionally continued by a '<base><digits> part
    // (whitespace between size and base is legal), or a bare 'h... literal.
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      int tl = line, tc = col;
      std::size_t off = i;
      std::string value;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) ||
                                   text[i] == '_')) {
          value.push_back(text[i]);
          advance(1);
        }
        // Peek across spaces/tabs for a based-literal continuation.
        std::size_t save_i = i;
        int save_line = line, save_col = col;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) advance(1);
        if (!(i + 1 < text.size() && text[i] == '\'' &&
              (is_base_char(text[i + 1]) ||
               ((text[i + 1] == 's' || text[i + 1] == 'S') && i + 2 < text.size() &&
                is_base_char(text[i + 2]))))) {
          i = save_i;
          line = save_line;
          col = save_col;
          push(TokKind::Number, std::move(value), tl, tc, off, i - off);
          continue;
        }
      }
      if (i < text.size() && text[i] == '\'') {
        value.push_back('\'');
        advance(1);
        if (i < text.size() && (text[i] == 's' || text[i] == 'S')) {
          value.push_back(text[i]);
          advance(1);
        }
        if (i >= text.size() || !is_base_char(text[i]))
          throw ParseError(path, line, col, "expected numeric base after '");
        value.push_back(text[i]);
        advance(1);
        if (i >= text.size() || !is_number_digit(text[i]))
          throw ParseError(path, line, col, "expected digits in based literal");
        while (i < text.size() && is_number_digit(text[i])) {
          value.push_back(text[i]);
          advance(1);
        }
      }
      push(TokKind::Number, std::move(value), tl, tc, off, i - off);
      continue;
    }

    if (c == '"') {
      int tl = line, tc = col;
      std::size_t off = i;
      std::string value;
      advance(1);
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          value.push_back(text[i + 1]);
          advance(2);
          continue;
        }
        if (text[i] == '\n') throw ParseError(path, tl, tc, "unterminated string literal");
        value.push_back(text[i]);
        advance(1);
      }
      if (i >= text.size()) throw ParseError(path, tl, tc, "unterminated string literal");
      advance(1);
      push(TokKind::String, std::move(value), tl, tc, off, i - off);
      continue;
    }

    bool matched = false;
    for (std::string_view sym : kMultiSymbols) {
      if (text.compare(i, sym.size(), sym) == 0) {
        push(TokKind::Symbol, std::string(sym), line, col, i, sym.size());
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (kSingleSymbols.find(c) != std::string_view::npos) {
      push(TokKind::Symbol, std::string(1, c), line, col, i, 1);
      advance(1);
      continue;
    }

    throw ParseError(path, line, col, std::string("stray character '") + c + "'");
  }

  Token eof;
  eof.kind = TokKind::Eof;
  eof.text = "<eof>";
  eof.line = line;
  eof.col = col;
  eof.offset = text.size();
  eof.length = 0;
  tokens.push_back(std::move(eof));
  return tokens;
}

}  // namespace iftrace
