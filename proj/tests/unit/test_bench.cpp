#include <doctest.h>

#include "fixtures.hpp"
#include "iftrace/bench.hpp"

using namespace iftrace;

namespace {

ToolConfig mock_config() {
  ToolConfig cfg = default_config();
  cfg.prompt_dir = testsupport::templates_dir();
  return cfg;
}

std::string bundled_manifest() { return testsupport::suite_path("manifest.json"); }

}  // namespace

TEST_CASE("bundled manifest loads 16 entries, half clean half leakage") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  CHECK(m.entries.size() == 16);
  int clean = 0, leakage = 0;
  for (const auto& e : m.entries)
    (e.label == BenchLabel::Clean ? clean : leakage)++;
  CHECK(clean == 8);
  CHECK(leakage == 8);
  for (const auto& e : m.entries) {
    CHECK(!e.sources.empty());
    CHECK(!e.assets.empty());
  }
}

TEST_CASE("manifest validation errors carry entry index and field") {
  testsupport::TempDir dir;

  testsupport::write_file(dir.str("no_label.json"),
                          R"({"benchmarks":[{"name":"x","sources":["x.v"],"top":"m","assets":[]}]})");
  testsupport::write_file(dir.str("x.v"), "module m; endmodule");
  try {
    load_manifest(dir.str("no_label.json"));
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(std::string(e.what()).find("entry 0") != std::string::npos);
    CHECK(std::string(e.what()).find("label") != std::string::npos);
  }

  testsupport::write_file(dir.str("missing_file.json"),
                          R"({"benchmarks":[{"name":"x","sources":["gone.v"],"top":"m","assets":[],"label":"clean"}]})");
  CHECK_THROWS_AS(load_manifest(dir.str("missing_file.json")), ManifestError);

  testsupport::write_file(dir.str("bad_json.json"), "{nope");
  CHECK_THROWS_AS(load_manifest(dir.str("bad_json.json")), ManifestError);
}

TEST_CASE("empty manifest loads but refuses to run") {
  testsupport::TempDir dir;
  testsupport::write_file(dir.str("empty.json"), R"({"benchmarks":[]})");
  BenchmarkManifest m = load_manifest(dir.str("empty.json"));
  CHECK(m.entries.empty());
  CHECK_THROWS_AS(run_benchmarks(m, mock_config(), BenchMode::DivideAndConquer),
                  EmptyBenchmarkError);
}

TEST_CASE("bundled suite scores perfectly with the deterministic backend") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  Metrics metrics = run_benchmarks(m, mock_config(), BenchMode::DivideAndConquer);
  CHECK(metrics.total == 16);
  CHECK(metrics.correct == 16);
  CHECK(metrics.success_rate == 1.0);
  CHECK(metrics.negatives == 8);
  CHECK(metrics.false_positives == 0);
  CHECK(metrics.false_positive_rate == 0.0);
  for (const auto& e : metrics.entries) {
    CAPTURE(e.name);
    CHECK(e.error.empty());
    CHECK(e.correct);
    if (e.path_agreement.has_value()) CHECK(*e.path_agreement);
  }
}

TEST_CASE("metrics arithmetic matches a naive recount") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  Metrics metrics = run_benchmarks(m, mock_config(), BenchMode::Monolithic);
  int correct = 0, negatives = 0, fps = 0;
  for (const auto& e : metrics.entries) {
    if (e.correct) ++correct;
    if (e.label == BenchLabel::Clean) {
      ++negatives;
      if (e.verdict.has_value() && *e.verdict) ++fps;
    }
  }
  CHECK(metrics.correct == correct);
  CHECK(metrics.negatives == negatives);
  CHECK(metrics.false_positives == fps);
  CHECK(metrics.success_rate == doctest::Approx(double(correct) / metrics.total));
}

TEST_CASE("sweep determinism: identical manifests give identical metrics bytes") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  Metrics a = run_benchmarks(m, mock_config(), BenchMode::DivideAndConquer);
  Metrics b = run_benchmarks(m, mock_config(), BenchMode::DivideAndConquer);
  CHECK(emit_metrics({a}, MetricsFormat::Json) == emit_metrics({b}, MetricsFormat::Json));
}

TEST_CASE("worker pool gives the same results as a serial sweep") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  ToolConfig serial = mock_config();
  ToolConfig parallel = mock_config();
  parallel.workers = 4;
  Metrics a = run_benchmarks(m, serial, BenchMode::DivideAndConquer);
  Metrics b = run_benchmarks(m, parallel, BenchMode::DivideAndConquer);
  CHECK(emit_metrics({a}, MetricsFormat::Json) == emit_metrics({b}, MetricsFormat::Json));
}

TEST_CASE("a broken entry is recorded as incorrect and the sweep continues") {
  testsupport::TempDir dir;
  testsupport::write_file(dir.str("good.v"),
                          "module good(input secret, output leak); assign leak = secret; endmodule");
  testsupport::write_file(dir.str("broken.v"), "module broken(");
  testsupport::write_file(
      dir.str("mix.json"),
      R"({"benchmarks":[
        {"name":"bad","sources":["broken.v"],"top":"broken",
         "assets":[{"module":"broken","signal":"x"}],"label":"clean"},
        {"name":"good","sources":["good.v"],"top":"good",
         "assets":[{"module":"good","signal":"secret","label":"s"}],"label":"leakage"}
      ]})");
  Metrics metrics = run_benchmarks(load_manifest(dir.str("mix.json")), mock_config(),
                                   BenchMode::DivideAndConquer);
  REQUIRE(metrics.entries.size() == 2);
  CHECK_FALSE(metrics.entries[0].correct);
  CHECK_FALSE(metrics.entries[0].error.empty());
  CHECK_FALSE(metrics.entries[0].verdict.has_value());
  CHECK(metrics.entries[1].correct);
  CHECK(metrics.success_rate == doctest::Approx(0.5));
}

TEST_CASE("table format matches the two-decimal percentage layout") {
  Metrics perfect;
  perfect.approach = "with divide and conquer";
  perfect.total = 16;
  perfect.correct = 16;
  perfect.success_rate = 1.0;
  perfect.negatives = 8;
  perfect.false_positives = 0;
  perfect.false_positive_rate = 0.0;
  std::string table = emit_metrics({perfect}, MetricsFormat::Table);
  CHECK(table.find("Approach") != std::string::npos);
  CHECK(table.find("Success Rate") != std::string::npos);
  CHECK(table.find("False Positive Rate") != std::string::npos);
  CHECK(table.find("with divide and conquer | 100.00%") != std::string::npos);
  CHECK(table.find("| 0.00%") != std::string::npos);

  Metrics partial;
  partial.approach = "w/o divide and conquer";
  partial.total = 14;
  partial.correct = 9;
  partial.success_rate = 9.0 / 14.0;
  partial.negatives = 8;
  partial.false_positives = 2;
  partial.false_positive_rate = 0.25;
  std::string t2 = emit_metrics({partial}, MetricsFormat::Table);
  CHECK(t2.find("64.29%") != std::string::npos);
  CHECK(t2.find("25.00%") != std::string::npos);
}

TEST_CASE("timings only appear in JSON when requested") {
  BenchmarkManifest m = load_manifest(bundled_manifest());
  Metrics metrics = run_benchmarks(m, mock_config(), BenchMode::DivideAndConquer);
  CHECK(emit_metrics({metrics}, MetricsFormat::Json).find("time_ms") == std::string::npos);
  CHECK(emit_metrics({metrics}, MetricsFormat::Json, true).find("time_ms") !=
        std::string::npos);
}
