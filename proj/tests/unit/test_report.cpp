#include <doctest.h>

#include "fixtures.hpp"
#include "iftrace/parser.hpp"
#include "iftrace/report.hpp"

using namespace iftrace;

namespace {

struct Design {
  SourceUnit unit;
  DesignGraph graph;
};

Design load_fixture(const std::string& rel) {
  Design d;
  d.unit = make_unit({{rel, testsupport::read_file(testsupport::suite_path(rel))}});
  auto hier = resolve_hierarchy(d.unit);
  d.graph = build_graph(hier.links, d.unit.module_names());
  return d;
}

LeakageReport fig_report(const std::string& rel, const std::vector<AssetSeed>& seeds,
                         const std::string& top, Design* out = nullptr) {
  Design d = load_fixture(rel);
  TaintState state = propagate(d.unit, d.graph, seeds);
  LeakageReport r = report_from_taint(state, top);
  if (out) *out = std::move(d);
  return r;
}

}  // namespace

TEST_CASE("trojan fixture report: verdict, type, path ending at top") {
  Design d;
  LeakageReport r = fig_report("aes_tsc_trojan/aes_top.v", {{"top", "KEY", "key"}}, "top", &d);
  CHECK(r.vulnerability_found);
  CHECK(r.leakage_type == LeakageType::Confidentiality);
  REQUIRE(!r.leakage_path.empty());
  CHECK(r.leakage_path.back() == "top");

  bool xor_step = false, exposure = false;
  for (const auto& t : r.transformations) {
    if (t.source == "key" && t.sink == "load" && t.from_module == "TSC") xor_step = true;
    if (t.source == "load" && t.sink == "capacitance" && t.to_module == "top")
      exposure = true;
  }
  CHECK(xor_step);
  CHECK(exposure);
  CHECK(validate_report(r, d.graph).empty());
}

TEST_CASE("clean variant: no verdict, empty fields") {
  Design d;
  LeakageReport r = fig_report("aes_tsc_clean/aes_top.v", {{"top", "KEY", "key"}}, "top", &d);
  CHECK_FALSE(r.vulnerability_found);
  CHECK(r.leakage_type == LeakageType::None);
  CHECK(r.vulnerable_modules.empty());
  CHECK(r.leakage_path.empty());
  CHECK(r.transformations.empty());
  CHECK(validate_report(r, d.graph).empty());
}

TEST_CASE("soc fixture report: exact module path") {
  Design d;
  LeakageReport r = fig_report("soc_config_leak/soc_top.v",
                               {{"config_mem_unit", "config_mem_data", "config"}},
                               "soc_integration_top", &d);
  CHECK(r.leakage_path ==
        std::vector<std::string>{"config_mem_unit", "status_transmitter_unit",
                                 "soc_integration_top"});
  bool handoff = false;
  for (const auto& t : r.transformations) {
    if (t.from_module == "status_transmitter_unit" && t.source == "config_in" &&
        t.sink == "tx_signal" && t.to_module == "soc_integration_top")
      handoff = true;
  }
  CHECK(handoff);
  CHECK(validate_report(r, d.graph).empty());
}

TEST_CASE("parse_report reads the canonical serialization back") {
  Design d;
  LeakageReport r = fig_report("aes_tsc_trojan/aes_top.v", {{"top", "KEY", "key"}}, "top", &d);
  LeakageReport back = parse_report(report_to_json(r));
  CHECK(back.vulnerability_found == r.vulnerability_found);
  CHECK(back.leakage_path == r.leakage_path);
  CHECK(back.vulnerable_modules == r.vulnerable_modules);
  CHECK(back.leakage_type == r.leakage_type);
  CHECK(back.transformations == r.transformations);
}

TEST_CASE("canonical serialization: fixed key order, 2-space indent, trailing newline") {
  LeakageReport r;
  r.vulnerability_found = false;
  r.leakage_type = LeakageType::None;
  r.explanation = "nothing";
  std::string json = report_to_json(r);
  CHECK(json ==
        "{\n"
        "  \"vulnerability_found\": false,\n"
        "  \"vulnerable_modules\": [],\n"
        "  \"leakage_path\": [],\n"
        "  \"leakage_type\": \"none\",\n"
        "  \"explanation\": \"nothing\",\n"
        "  \"transformations\": []\n"
        "}\n");
  CHECK(report_to_json(r) == json);
}

TEST_CASE("unknown leakage_type maps to other, original preserved") {
  LeakageReport r = parse_report(
      "{\"vulnerability_found\": true, \"leakage_path\": [\"a\"],"
      " \"leakage_type\": \"acoustic\", \"explanation\": \"hmm\"}");
  CHECK(r.leakage_type == LeakageType::Other);
  CHECK(r.explanation.find("acoustic") != std::string::npos);
  CHECK(r.explanation.find("hmm") != std::string::npos);
}

TEST_CASE("missing vulnerability_found is a schema error") {
  CHECK_THROWS_AS(parse_report("{\"leakage_path\": []}"), SchemaError);
  CHECK_THROWS_AS(parse_report("{\"vulnerability_found\": \"yes\"}"), SchemaError);
}

TEST_CASE("validation: unknown module in the path") {
  Design d = load_fixture("aes_tsc_trojan/aes_top.v");
  LeakageReport r;
  r.vulnerability_found = true;
  r.leakage_type = LeakageType::Confidentiality;
  r.leakage_path = {"TSC", "phantom"};
  auto violations = validate_report(r, d.graph);
  bool unknown = false;
  for (const auto& v : violations)
    if (v.code == "UnknownModule" && v.message.find("phantom") != std::string::npos)
      unknown = true;
  CHECK(unknown);
}

TEST_CASE("validation: disconnected consecutive pair") {
  Design d = load_fixture("aes_tsc_trojan/aes_top.v");
  LeakageReport r;
  r.vulnerability_found = true;
  r.leakage_type = LeakageType::Confidentiality;
  r.leakage_path = {"TSC", "lfsr_counter"};  // siblings, no edge either way
  auto violations = validate_report(r, d.graph);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "DisconnectedPath");
}

TEST_CASE("validation: verdict false with nonempty path") {
  Design d = load_fixture("aes_tsc_trojan/aes_top.v");
  LeakageReport r;
  r.vulnerability_found = false;
  r.leakage_type = LeakageType::None;
  r.leakage_path = {"TSC", "top"};
  auto violations = validate_report(r, d.graph);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "InconsistentVerdict");
}

TEST_CASE("validation: true verdict requires a path") {
  Design d = load_fixture("aes_tsc_trojan/aes_top.v");
  LeakageReport r;
  r.vulnerability_found = true;
  r.leakage_type = LeakageType::Confidentiality;
  auto violations = validate_report(r, d.graph);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "InconsistentVerdict");
}

TEST_CASE("validation: transformations must name known modules") {
  Design d = load_fixture("aes_tsc_trojan/aes_top.v");
  LeakageReport r;
  r.vulnerability_found = true;
  r.leakage_type = LeakageType::Confidentiality;
  r.leakage_path = {"TSC", "top"};
  r.transformations = {{"ghost", "a", "b", "top"}};
  auto violations = validate_report(r, d.graph);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "UnknownModule");
}

TEST_CASE("report verdict matches the taint ground truth on every bundled design") {
  struct Row {
    const char* rel;
    const char* top;
    AssetSeed seed;
    bool leaks;
  };
  const std::vector<Row> rows = {
      {"aes_tsc_trojan/aes_top.v", "top", {"top", "KEY", "key"}, true},
      {"aes_tsc_clean/aes_top.v", "top", {"top", "KEY", "key"}, false},
      {"soc_config_leak/soc_top.v", "soc_integration_top",
       {"config_mem_unit", "config_mem_data", "config"}, true},
      {"soc_config_clean/soc_top.v", "soc_integration_top",
       {"config_mem_unit", "config_mem_data", "config"}, false},
      {"covert_fsm_leak/covert_fsm.v", "covert_fsm", {"covert_fsm", "secret_key", "key"}, true},
      {"implicit_only_leak/implicit_leak.v", "implicit_leak",
       {"implicit_leak", "secret_bit", "secret"}, true},
      {"shift_accumulate_leak/shift_leak.v", "shift_leak",
       {"shift_leak", "session_key", "key"}, true},
      {"concat_select_leak/concat_leak.v", "concat_leak_top",
       {"concat_leak_top", "secret", "secret"}, true},
      {"arith_mask_leak/arith_leak.v", "arith_leak", {"arith_leak", "key_byte", "key"}, true},
      {"debug_port_leak/debug_leak.v", "debug_leak_top",
       {"debug_leak_top", "key_in", "key"}, true},
      {"pipeline_clean/pipeline_clean.v", "pipeline_clean_top",
       {"pipeline_clean_top", "spare_key", "key"}, false},
      {"fsm_clean/fsm_clean.v", "fsm_clean", {"fsm_clean", "secret_cfg", "config"}, false},
      {"parity_clean/parity_clean.v", "parity_clean",
       {"parity_clean", "unused_key", "key"}, false},
      {"alu_clean/alu_clean.v", "alu_clean_top", {"alu_clean_top", "hmac_key", "key"}, false},
      {"lfsr_clean/lfsr_clean.v", "lfsr_clean_top",
       {"lfsr_clean_top", "master_key", "key"}, false},
      {"handshake_clean/handshake_clean.v", "handshake_clean_top",
       {"handshake_clean_top", "session_id", "session"}, false},
  };
  for (const auto& row : rows) {
    CAPTURE(row.rel);
    Design d;
    LeakageReport r = fig_report(row.rel, {row.seed}, row.top, &d);
    CHECK(r.vulnerability_found == row.leaks);
    CHECK(validate_report(r, d.graph).empty());
  }
}
