#pragma once

#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct GeneratedCircuit {
  std::string text;                 // one combinational module named "rand_mod"
  std::vector<std::string> inputs;  // input port names
  int total_input_bits = 0;
};

// Random combinational module: a few input ports (total width <= 10 bits),
// internal wires built from random expressions over earlier signals (keeps
// the module loop-free), some modules get an always @(*) block with if/case,
// and one output mirrors the last wire.
inline GeneratedCircuit random_comb_module(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  GeneratedCircuit out;
  int n_inputs = pick(2, 4);
  std::vector<int> widths;
  int total = 0;
  for (int i = 0; i < n_inputs; ++i) {
    int remaining = 10 - total - (n_inputs - i - 1);  // leave 1 bit per later input
    int w = pick(1, std::min(4, std::max(1, remaining)));
    widths.push_back(w);
    total += w;
  }
  out.total_input_bits = total;

  struct Sig {
    std::string name;
    int width;
  };
  std::vector<Sig> avail;

  std::string text = "module rand_mod (\n";
  for (int i = 0; i < n_inputs; ++i) {
    std::string name = "in" + std::to_string(i);
    out.inputs.push_back(name);
    avail.push_back({name, widths[i]});
    text += "  input wire ";
    if (widths[i] > 1) text += "[" + std::to_string(widths[i] - 1) + ":0] ";
    text += name + ",\n";
  }
  text += "  output wire [3:0] result\n);\n";

  // Random expression over available signals, depth-limited.
  auto gen_expr = [&](auto&& self, int depth) -> std::string {
    if (depth <= 0 || pick(0, 3) == 0) {
      if (pick(0, 4) == 0) return std::to_string(pick(0, 15));
      const Sig& s = avail[static_cast<std::size_t>(pick(0, static_cast<int>(avail.size()) - 1))];
      int mode = pick(0, 3);
      if (mode == 0 && s.width > 1) {
        int bit = pick(0, s.width - 1);
        return s.name + "[" + std::to_string(bit) + "]";
      }
      if (mode == 1 && s.width > 2) {
        int lo = pick(0, s.width - 2);
        int hi = pick(lo, s.width - 1);
        return s.name + "[" + std::to_string(hi) + ":" + std::to_string(lo) + "]";
      }
      return s.name;
    }
    int form = pick(0, 8);
    std::string a = self(self, depth - 1);
    std::string b = self(self, depth - 1);
    switch (form) {
      case 0: return "(" + a + " & " + b + ")";
      case 1: return "(" + a + " | " + b + ")";
      case 2: return "(" + a + " ^ " + b + ")";
      case 3: return "(" + a + " + " + b + ")";
      case 4: return "(" + a + " == " + b + ")";
      case 5: return "(~" + a + ")";
      case 6: return "(" + a + " ? " + b + " : " + self(self, depth - 1) + ")";
      case 7: return "{" + a + ", " + b + "}";
      default: return "(" + a + " << " + std::to_string(pick(0, 2)) + ")";
    }
  };

  int n_wires = pick(2, 5);
  for (int i = 0; i < n_wires; ++i) {
    std::string name = "w" + std::to_string(i);
    int w = pick(1, 4);
    text += "  wire ";
    if (w > 1) text += "[" + std::to_string(w - 1) + ":0] ";
    text += name + ";\n";
    text += "  assign " + name + " = " + gen_expr(gen_expr, 2) + ";\n";
    avail.push_back({name, w});
  }

  // Some circuits add a procedural block with control flow.
  if (pick(0, 1) == 0) {
    std::string cond = gen_expr(gen_expr, 1);
    std::string subject = avail[static_cast<std::size_t>(
                              pick(0, static_cast<int>(avail.size()) - 1))]
                              .name;
    text += "  reg [3:0] pr;\n";
    text += "  always @(*) begin\n";
    text += "    pr = 4'd0;\n";
    text += "    if (" + cond + ") begin\n";
    text += "      case (" + subject + ")\n";
    text += "        0: pr = " + gen_expr(gen_expr, 1) + ";\n";
    text += "        1: pr = " + gen_expr(gen_expr, 1) + ";\n";
    text += "        default: pr = " + gen_expr(gen_expr, 1) + ";\n";
    text += "      endcase\n";
    text += "    end else begin\n";
    text += "      pr = " + gen_expr(gen_expr, 1) + ";\n";
    text += "    end\n";
    text += "  end\n";
    avail.push_back({"pr", 4});
  }

  text += "  assign result = " + avail.back().name + ";\n";
  text += "endmodule\n";
  out.text = std::move(text);
  return out;
}

}  // namespace testsupport
