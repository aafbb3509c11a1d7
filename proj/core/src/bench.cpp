#include "iftrace/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "iftrace/parser.hpp"
#include "iftrace/pipeline.hpp"

namespace iftrace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ManifestError::ManifestError(int entry_index, const std::string& field,
                             const std::string& why)
    : std::runtime_error("manifest entry " + std::to_string(entry_index) + ", field '" +
                         field + "': " + why) {}

EmptyBenchmarkError::EmptyBenchmarkError()
    : std::runtime_error("benchmark manifest has no entries") {}

const char* bench_mode_name(BenchMode m) {
  return m == BenchMode::DivideAndConquer ? "with divide and conquer"
                                          : "w/o divide and conquer";
}

BenchmarkManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(-1, "path", "cannot open manifest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object())
    throw ManifestError(-1, "root", "manifest is not a JSON object");
  if (!j.contains("benchmarks") || !j.at("benchmarks").is_array())
    throw ManifestError(-1, "benchmarks", "missing list key 'benchmarks'");

  BenchmarkManifest manifest;
  manifest.dir = fs::path(path).parent_path().string();

  int index = 0;
  std::set<std::string> names;
  for (const auto& e : j.at("benchmarks")) {
    if (!e.is_object()) throw ManifestError(index, "entry", "must be an object");
    ManifestEntry entry;

    if (!e.contains("name") || !e.at("name").is_string())
      throw ManifestError(index, "name", "missing string");
    entry.name = e.at("name").get<std::string>();
    if (!names.insert(entry.name).second)
      throw ManifestError(index, "name", "duplicate entry name '" + entry.name + "'");

    if (!e.contains("sources") || !e.at("sources").is_array() || e.at("sources").empty())
      throw ManifestError(index, "sources", "missing nonempty list");
    for (const auto& s : e.at("sources")) {
      if (!s.is_string()) throw ManifestError(index, "sources", "must contain strings");
      fs::path p = s.get<std::string>();
      if (p.is_relative()) p = fs::path(manifest.dir) / p;
      if (!fs::exists(p))
        throw ManifestError(index, "sources", "file does not exist: " + p.string());
      entry.sources.push_back(p.string());
    }

    if (!e.contains("top") || !e.at("top").is_string())
      throw ManifestError(index, "top", "missing string");
    entry.top = e.at("top").get<std::string>();

    if (!e.contains("assets") || !e.at("assets").is_array())
      throw ManifestError(index, "assets", "missing list");
    for (const auto& a : e.at("assets")) {
      if (!a.is_object() || !a.contains("module") || !a.contains("signal"))
        throw ManifestError(index, "assets", "entries need 'module' and 'signal'");
      AssetSeed seed;
      seed.module = a.at("module").get<std::string>();
      seed.signal = a.at("signal").get<std::string>();
      seed.label = a.contains("label") ? a.at("label").get<std::string>() : seed.signal;
      entry.assets.push_back(std::move(seed));
    }

    if (!e.contains("label") || !e.at("label").is_string())
      throw ManifestError(index, "label", "missing string");
    std::string label = e.at("label").get<std::string>();
    if (label == "leakage") {
      entry.label = BenchLabel::Leakage;
    } else if (label == "clean") {
      entry.label = BenchLabel::Clean;
    } else {
      throw ManifestError(index, "label", "must be 'leakage' or 'clean', got '" + label + "'");
    }

    if (e.contains("expected_path")) {
      if (!e.at("expected_path").is_array())
        throw ManifestError(index, "expected_path", "must be a list");
      std::vector<std::string> path_modules;
      for (const auto& m : e.at("expected_path")) path_modules.push_back(m.get<std::string>());
      entry.expected_path = std::move(path_modules);
    }

    manifest.entries.push_back(std::move(entry));
    ++index;
  }
  return manifest;
}

namespace {

// True when `expected` is an ordered subsequence of `actual`.
bool subsequence_match(const std::vector<std::string>& expected,
                       const std::vector<std::string>& actual) {
  std::size_t k = 0;
  for (const auto& m : actual) {
    if (k < expected.size() && expected[k] == m) ++k;
  }
  return k == expected.size();
}

EntryResult run_entry(const ManifestEntry& entry, const ToolConfig& cfg,
                      const PromptTemplates& templates, BenchMode mode) {
  EntryResult result;
  result.name = entry.name;
  result.label = entry.label;
  auto t0 = std::chrono::steady_clock::now();
  try {
    SourceUnit unit = load_unit(entry.sources);
    HierarchyResult hier = resolve_hierarchy(unit);
    DesignGraph g = build_graph(hier.links, unit.module_names());
    Schedule schedule = topo_sort(g);
    if (!unit.find_module(entry.top))
      throw std::runtime_error("top module '" + entry.top + "' not found");

    MockSources mock{&unit, &g, entry.assets, entry.top,
                     TaintOptions{cfg.include_clocks}};
    std::unique_ptr<Backend> backend = make_backend(cfg.backend, &mock);

    AnalysisContext ctx;
    ctx.techniques = templates.techniques;
    ctx.budget_chars = cfg.context_budget_chars;

    LeakageReport report;
    if (mode == BenchMode::DivideAndConquer) {
      PipelineResult pr = run_pipeline(unit, g, schedule, *backend, templates, ctx);
      report = run_integration(pr.context, g, *backend, templates);
    } else {
      report = run_monolithic(unit, ctx, *backend, templates);
    }

    std::vector<Violation> violations = validate_report(report, g);
    if (!violations.empty()) {
      std::string text = "report failed validation:";
      for (const auto& v : violations) text += " [" + v.code + "] " + v.message + ";";
      throw std::runtime_error(text);
    }

    result.verdict = report.vulnerability_found;
    result.correct =
        report.vulnerability_found == (entry.label == BenchLabel::Leakage);
    if (entry.expected_path && report.vulnerability_found)
      result.path_agreement = subsequence_match(*entry.expected_path, report.leakage_path);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.correct = false;
  }
  auto t1 = std::chrono::steady_clock::now();
  result.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

}  // namespace

Metrics run_benchmarks(const BenchmarkManifest& manifest, const ToolConfig& cfg,
                       BenchMode mode) {
  if (manifest.entries.empty()) throw EmptyBenchmarkError();
  PromptTemplates templates = load_templates(cfg.prompt_dir, cfg.techniques);

  Metrics metrics;
  metrics.approach = bench_mode_name(mode);
  metrics.total = static_cast<int>(manifest.entries.size());
  metrics.entries.resize(manifest.entries.size());

  int workers = std::min<int>(cfg.workers, static_cast<int>(manifest.entries.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
      metrics.entries[i] = run_entry(manifest.entries[i], cfg, templates, mode);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= manifest.entries.size()) return;
          metrics.entries[i] = run_entry(manifest.entries[i], cfg, templates, mode);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const EntryResult& r : metrics.entries) {
    if (r.correct) ++metrics.correct;
    if (r.label == BenchLabel::Clean) {
      ++metrics.negatives;
      if (r.verdict.has_value() && *r.verdict) ++metrics.false_positives;
    }
  }
  metrics.success_rate =
      metrics.total > 0 ? static_cast<double>(metrics.correct) / metrics.total : 0.0;
  metrics.false_positive_rate =
      metrics.negatives > 0
          ? static_cast<double>(metrics.false_positives) / metrics.negatives
          : 0.0;
  return metrics;
}

std::string emit_metrics(const std::vector<Metrics>& all, MetricsFormat format,
                         bool with_timings) {
  if (format == MetricsFormat::Json) {
    auto arr = ordered_json::array();
    for (const Metrics& m : all) {
      ordered_json j;
      j["approach"] = m.approach;
      j["total"] = m.total;
      j["correct"] = m.correct;
      j["success_rate"] = m.success_rate;
      j["negatives"] = m.negatives;
      j["false_positives"] = m.false_positives;
      j["false_positive_rate"] = m.false_positive_rate;
      auto entries = ordered_json::array();
      for (const EntryResult& r : m.entries) {
        ordered_json e;
        e["name"] = r.name;
        e["label"] = r.label == BenchLabel::Leakage ? "leakage" : "clean";
        if (r.verdict.has_value())
          e["verdict"] = *r.verdict;
        else
          e["verdict"] = nullptr;
        e["correct"] = r.correct;
        if (r.path_agreement.has_value()) e["path_agreement"] = *r.path_agreement;
        if (!r.error.empty()) e["error"] = r.error;
        if (with_timings) e["time_ms"] = r.wall_ms;
        entries.push_back(std::move(e));
      }
      j["entries"] = std::move(entries);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }

  // Aligned table with two-decimal percentages.
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return std::string(buf);
  };
  std::size_t name_width = std::string("Approach").size();
  for (const Metrics& m : all) name_width = std::max(name_width, m.approach.size());

  std::ostringstream os;
  os << std::string(name_width, ' ').replace(0, 8, "Approach")
     << " | Success Rate | False Positive Rate\n";
  for (const Metrics& m : all) {
    std::string name = m.approach;
    name.resize(name_width, ' ');
    std::string sr = pct(m.success_rate);
    sr.resize(std::string("Success Rate").size(), ' ');
    os << name << " | " << sr << " | " << pct(m.false_positive_rate) << "\n";
  }
  return os.str();
}

}  // namespace iftrace
