#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iftrace/diag.hpp"

namespace iftrace {

// Expression tree for the synthesizable Verilog-2001 subset. Nodes have value
// semantics; children live in `operands`.
struct Expr {
  enum class Kind {
    Number,
    Ident,
    Unary,
    Binary,
    Ternary,
    Concat,
    Replicate,
    BitSelect,
    PartSelect,
  };

  Kind kind = Kind::Number;

  uint64_t value = 0;  // Number
  int width = 32;      // Number: declared size, 32 when unsized
  bool sized = false;  // Number: literal carried an explicit size

  std::string name;  // Ident; base identifier of Bit/PartSelect
  std::string op;    // Unary / Binary operator spelling

  int msb = 0, lsb = 0;  // PartSelect bounds (constant at parse)
  int repeat = 0;        // Replicate count (constant at parse)

  // Unary: [operand]; Binary: [lhs, rhs]; Ternary: [cond, then, else];
  // Concat: members msb-first; Replicate: [member]; BitSelect: [index].
  std::vector<Expr> operands;

  static Expr number(uint64_t v, int w = 32, bool sized_literal = false);
  static Expr ident(std::string n);
};

bool structurally_equal(const Expr& a, const Expr& b);

enum class PortDir { In, Out, InOut };
enum class NetKind { Wire, Reg };

struct Port {
  std::string name;
  PortDir dir = PortDir::In;
  int width = 1;
  int msb = 0, lsb = 0;
  bool is_reg = false;
  bool is_signed = false;
  bool dir_known = true;  // false until a non-ANSI body declaration supplies it
  int line = 0, col = 0;
};

struct NetDecl {
  std::string name;
  NetKind kind = NetKind::Wire;
  int width = 1;
  int msb = 0, lsb = 0;
  bool is_signed = false;
  bool implicit = false;  // auto-declared after an undeclared-identifier use
  int line = 0, col = 0;
};

// Continuous assignment.
struct AssignStmt {
  Expr lhs;
  Expr rhs;
  int line = 0, col = 0;
};

// Procedural statement inside an always block.
struct Stmt {
  enum class Kind { Blocking, NonBlocking, If, Case };

  struct CaseItem {
    std::vector<Expr> labels;  // empty for default
    bool is_default = false;
    std::vector<Stmt> body;
  };

  Kind kind = Kind::Blocking;
  Expr lhs, rhs;  // assignments
  Expr cond;      // if condition / case subject
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  std::vector<CaseItem> items;
  std::string case_kind;  // "case" | "casez" | "casex"
  int line = 0, col = 0;
};

struct EventTerm {
  enum class EdgeKind { Level, Pos, Neg };
  EdgeKind edge = EdgeKind::Level;
  std::string signal;
};

struct ProcBlock {
  bool star = false;  // @* or @(*)
  std::vector<EventTerm> sensitivity;
  std::vector<Stmt> body;
  int line = 0, col = 0;
};

struct Connection {
  std::string formal;          // empty while positional and unresolved
  std::optional<Expr> actual;  // nullopt for an explicitly unconnected .port()
  bool from_positional = false;
};

struct Instance {
  std::string module_name;
  std::string instance_name;
  std::vector<Connection> connections;
  int line = 0, col = 0;
};

struct ModuleDecl {
  std::string name;
  std::vector<Port> ports;
  std::vector<NetDecl> nets;  // internal signals only; never shadows a port
  std::vector<AssignStmt> assigns;
  std::vector<ProcBlock> always_blocks;
  std::vector<Instance> instances;
  std::vector<std::pair<std::string, int64_t>> params;  // resolved constants

  std::string source_text;  // verbatim `module ... endmodule`
  std::string file;
  int line = 0, col = 0;

  const Port* find_port(const std::string& n) const;
  const NetDecl* find_net(const std::string& n) const;
  bool declares(const std::string& n) const;
  // Declared width of a port or net; 0 when unknown.
  int width_of(const std::string& n) const;
};

// Structural equality over the parsed shape: ignores source positions,
// source_text, resolved parameter tables, and positional-origin flags.
bool structurally_equal(const ModuleDecl& a, const ModuleDecl& b);

struct SourceFile {
  std::string path;
  std::string text;
};

struct SourceUnit {
  std::vector<SourceFile> files;
  std::vector<ModuleDecl> modules;  // file order, then declaration order
  std::optional<std::string> top;
  std::vector<Diagnostic> diagnostics;

  const ModuleDecl* find_module(const std::string& n) const;
  std::vector<std::string> module_names() const;
};

}  // namespace iftrace
