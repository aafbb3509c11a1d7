#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "iftrace/parser.hpp"
#include "iftrace/printer.hpp"

using namespace iftrace;

TEST_CASE("expression printing is minimal and readable") {
  auto r = parse_source(
      "module m(input [7:0] key, input [7:0] lfsr_stream, output [7:0] load,\n"
      "         output [7:0] o2, output o3);\n"
      "  assign load = key ^ lfsr_stream;\n"
      "  assign o2 = {key[3:0], lfsr_stream[7:4]};\n"
      "  assign o3 = key[0] ? &lfsr_stream : |key;\n"
      "endmodule",
      "p.v");
  const ModuleDecl& m = r.modules[0];
  CHECK(expr_to_string(m.assigns[0].lhs) + " = " + expr_to_string(m.assigns[0].rhs) ==
        "load = key ^ lfsr_stream");
  CHECK(expr_to_string(m.assigns[1].rhs) == "{key[3:0], lfsr_stream[7:4]}");
  CHECK(expr_to_string(m.assigns[2].rhs) == "key[0] ? &lfsr_stream : |key");
}

TEST_CASE("precedence-sensitive expressions keep parentheses where needed") {
  auto r = parse_source(
      "module m(input [7:0] a, input [7:0] b, output [7:0] y);\n"
      "  assign y = (a + b) & 8'hFE;\n"
      "endmodule",
      "prec.v");
  std::string printed = expr_to_string(r.modules[0].assigns[0].rhs);
  auto back = parse_source("module m(input [7:0] a, input [7:0] b, output [7:0] y); assign y = " +
                               printed + "; endmodule",
                           "prec2.v");
  CHECK(structurally_equal(r.modules[0].assigns[0].rhs, back.modules[0].assigns[0].rhs));
}

TEST_CASE("print then reparse is structurally stable across the bundled corpus") {
  namespace fs = std::filesystem;
  int checked = 0;
  for (const auto& dir : fs::directory_iterator(testsupport::suite_path(""))) {
    if (!dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(dir.path())) {
      if (file.path().extension() != ".v") continue;
      std::string text = testsupport::read_file(file.path().string());
      auto first = parse_source(text, file.path().string());
      for (const ModuleDecl& m : first.modules) {
        CAPTURE(file.path().string());
        CAPTURE(m.name);
        std::string printed = print_module(m);
        auto second = parse_source(printed, "printed.v");
        REQUIRE(second.modules.size() == 1);
        CHECK(structurally_equal(m, second.modules[0]));
        ++checked;
      }
    }
  }
  CHECK(checked >= 16 * 1);  // every bundled design contributes at least one module
}
