#include <doctest.h>

#include "fixtures.hpp"
#include "iftrace/finding.hpp"
#include "iftrace/parser.hpp"

using namespace iftrace;

TEST_CASE("well-formed finding JSON parses into all four fields") {
  std::string raw =
      "{\"sensitive_sources\":[\"key\"],\"influenced_assets\":[\"load\"],"
      "\"transformations\":[\"load = key ^ lfsr_stream\"],"
      "\"flows\":[{\"source\":\"key\",\"sink\":\"load\",\"scope\":\"internal\"}]}";
  ModuleFinding f = parse_finding(raw, "TSC");
  CHECK(f.module == "TSC");
  CHECK(f.sensitive_sources == std::vector<std::string>{"key"});
  CHECK(f.influenced_assets == std::vector<std::string>{"load"});
  CHECK(f.transformations == std::vector<std::string>{"load = key ^ lfsr_stream"});
  REQUIRE(f.flows.size() == 1);
  CHECK(f.flows[0] == Flow{"key", "load", FlowScope::Internal});
}

TEST_CASE("fenced and prose-wrapped replies parse identically") {
  std::string core =
      "{\"sensitive_sources\":[\"key\"],\"influenced_assets\":[\"load\"],"
      "\"transformations\":[\"load = key ^ lfsr_stream\"],"
      "\"flows\":[{\"source\":\"key\",\"sink\":\"load\",\"scope\":\"internal\"}]}";
  std::string wrapped = "Sure! Here is the analysis you asked for:\n\n```json\n" + core +
                        "\n```\n\nLet me know if you need anything else.";
  ModuleFinding a = parse_finding(core, "TSC");
  ModuleFinding b = parse_finding(wrapped, "TSC");
  CHECK(a == b);
}

TEST_CASE("refusal prose is a SchemaError") {
  CHECK_THROWS_AS(parse_finding("I cannot analyze this.", "m"), SchemaError);
}

TEST_CASE("missing list keys default to empty") {
  ModuleFinding f = parse_finding("{\"sensitive_sources\":[\"k\"]}", "m");
  CHECK(f.sensitive_sources == std::vector<std::string>{"k"});
  CHECK(f.influenced_assets.empty());
  CHECK(f.transformations.empty());
  CHECK(f.flows.empty());
}

TEST_CASE("signal names normalize to declared case") {
  auto r = parse_source(
      "module top(input [7:0] KEY, output [7:0] Load); assign Load = KEY; endmodule",
      "n.v");
  std::string raw =
      "{\"sensitive_sources\":[\"key\"],\"influenced_assets\":[\"LOAD\"],"
      "\"flows\":[{\"source\":\"Key\",\"sink\":\"load\"}]}";
  ModuleFinding f = parse_finding(raw, "top", &r.modules[0]);
  CHECK(f.sensitive_sources == std::vector<std::string>{"KEY"});
  CHECK(f.influenced_assets == std::vector<std::string>{"Load"});
  CHECK(f.flows[0].source == "KEY");
  CHECK(f.flows[0].sink == "Load");
  CHECK(f.flows[0].scope == FlowScope::Internal);  // default scope
}

TEST_CASE("malformed reply corpus: schema-valid finding or SchemaError, never partial") {
  const std::vector<std::string> corpus = {
      "",
      "   ",
      "I cannot analyze this.",
      "null",
      "[1, 2, 3]",
      "{",
      "}",
      "{}",
      "{\"sensitive_sources\": \"key\"}",
      "{\"sensitive_sources\": [1, 2]}",
      "{\"flows\": \"nope\"}",
      "{\"flows\": [\"nope\"]}",
      "{\"flows\": [{\"source\": \"a\"}]}",
      "{\"flows\": [{\"source\": \"a\", \"sink\": \"\"}]}",
      "{\"flows\": [{\"source\": \"a\", \"sink\": \"b\", \"scope\": \"sideways\"}]}",
      "{\"flows\": [{\"source\": \"a\", \"sink\": \"b\", \"scope\": 3}]}",
      "{not json at all}",
      "{\"unterminated\": \"string}",
      "text with {braces} in prose and no object",
      "{\"a\":{\"b\":{\"c\":[]}}}",
      "```json\n{\"sensitive_sources\": [\"k\"]\n```",
      "reply: {\"sensitive_sources\":[\"k\"]} trailing {garbage",
      "{\"sensitive_sources\":[],\"influenced_assets\":[],"
      "\"transformations\":[],\"flows\":[]}",
      "\xEF\xBB\xBF{\"sensitive_sources\":[\"k\"]}",
      "first {\"sensitive_sources\": \"bad\"} then {\"sensitive_sources\": [\"ok\"]}",
  };
  int parsed = 0, rejected = 0;
  for (const auto& raw : corpus) {
    CAPTURE(raw);
    try {
      ModuleFinding f = parse_finding(raw, "m");
      // Schema-valid: every flow has nonempty endpoints.
      for (const auto& fl : f.flows) {
        CHECK_FALSE(fl.source.empty());
        CHECK_FALSE(fl.sink.empty());
      }
      ++parsed;
    } catch (const SchemaError& e) {
      CHECK_FALSE(e.failure().empty());
      ++rejected;
    }
  }
  CHECK(parsed + rejected == static_cast<int>(corpus.size()));
  CHECK(rejected >= 10);
  CHECK(parsed >= 5);
}

TEST_CASE("first valid object wins when several blobs appear") {
  std::string raw =
      "first {\"sensitive_sources\": \"bad\"} then {\"sensitive_sources\": [\"ok\"]}";
  // The first balanced blob parses as JSON but fails the schema; it is a
  // schema error, not silently skipped.
  CHECK_THROWS_AS(parse_finding(raw, "m"), SchemaError);

  std::string raw2 = "{oops not json} but later {\"sensitive_sources\": [\"ok\"]}";
  ModuleFinding f = parse_finding(raw2, "m");
  CHECK(f.sensitive_sources == std::vector<std::string>{"ok"});
}

TEST_CASE("serialization is canonical and round-trips") {
  ModuleFinding f;
  f.module = "TSC";
  f.sensitive_sources = {"key"};
  f.influenced_assets = {"load"};
  f.transformations = {"load = key ^ lfsr_stream"};
  f.flows = {{"key", "load", FlowScope::Internal}};
  std::string json = finding_to_json(f);
  CHECK(json.find("\"module\":\"TSC\"") != std::string::npos);
  ModuleFinding back = parse_finding(json, "TSC");
  CHECK(back == f);
  CHECK(finding_to_json(f) == json);
}
