#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "iftrace/deps.hpp"
#include "iftrace/parser.hpp"

using namespace iftrace;

namespace {

ModuleDecl parse_one(const std::string& text) {
  auto r = parse_source(text, "dep.v");
  REQUIRE(r.modules.size() == 1);
  return r.modules[0];
}

}  // namespace

TEST_CASE("simple and gate gives two explicit edges") {
  ModuleDecl m =
      parse_one("module m(input a, input b, output y); assign y = a & b; endmodule");
  auto edges = extract_dependencies(m);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == DepEdge{"a", "y", DepKind::Explicit});
  CHECK(edges[1] == DepEdge{"b", "y", DepKind::Explicit});
}

TEST_CASE("clocked mux: data explicit, select implicit, clock excluded") {
  ModuleDecl m = parse_one(
      "module m(input clk, input sel, input d, output reg q);\n"
      "  always @(posedge clk) if (sel) q <= d;\n"
      "endmodule");
  auto edges = extract_dependencies(m);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == DepEdge{"d", "q", DepKind::Explicit});
  CHECK(edges[1] == DepEdge{"sel", "q", DepKind::Implicit});

  auto with_clocks = extract_dependencies(m, DepOptions{.include_clocks = true});
  REQUIRE(with_clocks.size() == 3);
  CHECK(with_clocks[2] == DepEdge{"clk", "q", DepKind::Implicit});
}

TEST_CASE("trojan cell body yields the two xor operand edges") {
  std::string text = testsupport::read_file(testsupport::suite_path("aes_tsc_trojan/aes_top.v"));
  auto r = parse_source(text, "aes_top.v");
  const ModuleDecl* tsc = nullptr;
  for (const auto& m : r.modules)
    if (m.name == "TSC") tsc = &m;
  REQUIRE(tsc != nullptr);
  auto edges = extract_dependencies(*tsc);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == DepEdge{"key", "load", DepKind::Explicit});
  CHECK(edges[1] == DepEdge{"lfsr_stream", "load", DepKind::Explicit});
}

TEST_CASE("ternary condition counts as an explicit right-hand-side read") {
  ModuleDecl m = parse_one(
      "module m(input s, input a, input b, output y); assign y = s ? a : b; endmodule");
  auto edges = extract_dependencies(m);
  REQUIRE(edges.size() == 3);
  CHECK(edges[0] == DepEdge{"s", "y", DepKind::Explicit});
}

TEST_CASE("case subject taints every arm including default") {
  ModuleDecl m = parse_one(
      "module m(input [1:0] sel, input a, input b, output reg y);\n"
      "  always @(*) begin\n"
      "    case (sel)\n"
      "      2'b00: y = a;\n"
      "      2'b01: y = b;\n"
      "      default: y = 1'b0;\n"
      "    endcase\n"
      "  end\n"
      "endmodule");
  auto edges = extract_dependencies(m);
  // a and b explicit; sel implicit (deduplicated across arms).
  CHECK(std::count_if(edges.begin(), edges.end(), [](const DepEdge& e) {
          return e.kind == DepKind::Implicit && e.from == "sel" && e.to == "y";
        }) == 1);
  CHECK(std::count_if(edges.begin(), edges.end(), [](const DepEdge& e) {
          return e.kind == DepKind::Explicit;
        }) == 2);
}

TEST_CASE("else branch inherits the if condition") {
  ModuleDecl m = parse_one(
      "module m(input c, input a, input b, output reg y);\n"
      "  always @(*) begin\n"
      "    if (c) y = a; else y = b;\n"
      "  end\n"
      "endmodule");
  auto edges = extract_dependencies(m);
  bool else_implicit = false;
  for (const auto& e : edges)
    if (e.from == "c" && e.to == "y" && e.kind == DepKind::Implicit) else_implicit = true;
  CHECK(else_implicit);
}

TEST_CASE("variable bit-select index is an explicit source on both sides") {
  ModuleDecl m = parse_one(
      "module m(input [7:0] d, input [2:0] i, output reg [7:0] q);\n"
      "  always @(*) q[i] = d[i];\n"
      "endmodule");
  auto edges = extract_dependencies(m);
  bool idx_edge = false, data_edge = false;
  for (const auto& e : edges) {
    if (e.from == "i" && e.to == "q" && e.kind == DepKind::Explicit) idx_edge = true;
    if (e.from == "d" && e.to == "q" && e.kind == DepKind::Explicit) data_edge = true;
  }
  CHECK(idx_edge);
  CHECK(data_edge);
}

TEST_CASE("concatenation target fans sources out to every member") {
  ModuleDecl m = parse_one(
      "module m(input [3:0] a, output [1:0] hi, output [1:0] lo);\n"
      "  assign {hi, lo} = a;\n"
      "endmodule");
  auto edges = extract_dependencies(m);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == DepEdge{"a", "hi", DepKind::Explicit});
  CHECK(edges[1] == DepEdge{"a", "lo", DepKind::Explicit});
}

TEST_CASE("extraction is pure: identical input, identical edges") {
  ModuleDecl m = parse_one(
      "module m(input c, input a, output reg y); always @(*) if (c) y = a; endmodule");
  CHECK(extract_dependencies(m) == extract_dependencies(m));
}

TEST_CASE("every edge endpoint is a declared signal across the corpus") {
  namespace fs = std::filesystem;
  for (const auto& dir : fs::directory_iterator(testsupport::suite_path(""))) {
    if (!dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(dir.path())) {
      if (file.path().extension() != ".v") continue;
      auto r = parse_source(testsupport::read_file(file.path().string()),
                            file.path().string());
      for (const ModuleDecl& m : r.modules) {
        for (const DepEdge& e : extract_dependencies(m)) {
          CAPTURE(m.name);
          CHECK(m.declares(e.from));
          CHECK(m.declares(e.to));
        }
      }
    }
  }
}

TEST_CASE("hierarchy resolution lists resolved instances in order") {
  std::string text = testsupport::read_file(testsupport::suite_path("aes_tsc_trojan/aes_top.v"));
  SourceUnit unit = make_unit({{"aes_top.v", text}});
  auto hier = resolve_hierarchy(unit);
  REQUIRE(hier.links.size() == 2);
  CHECK(hier.links[0] == HierarchyLink{"top", "TSC", "u_tsc"});
  CHECK(hier.links[1] == HierarchyLink{"top", "lfsr_counter", "u_lfsr"});
  CHECK(hier.diagnostics.empty());
}

TEST_CASE("single leaf module resolves to an empty hierarchy") {
  SourceUnit unit = make_unit({{"leaf.v", "module leaf(input a, output y); assign y = a; endmodule"}});
  auto hier = resolve_hierarchy(unit);
  CHECK(hier.links.empty());
  CHECK(hier.diagnostics.empty());
}

TEST_CASE("unresolved target becomes a black-box diagnostic, not a failure") {
  SourceUnit unit = make_unit(
      {{"top.v", "module top(input x, output z); ext_phy u(.a(x), .y(z)); endmodule"}});
  auto hier = resolve_hierarchy(unit);
  CHECK(hier.links.empty());
  REQUIRE(hier.diagnostics.size() == 1);
  CHECK(hier.diagnostics[0].message.find("ext_phy") != std::string::npos);
}
