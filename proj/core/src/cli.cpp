#include "iftrace/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "iftrace/bench.hpp"
#include "iftrace/parser.hpp"
#include "iftrace/pipeline.hpp"
#include "iftrace/taint.hpp"

namespace iftrace {

namespace fs = std::filesystem;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitLeakage = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;
constexpr int kExitValidation = 4;

struct CommonOptions {
  std::string config_path;
  bool verbose = false;
  std::string backend_kind;
  std::string endpoint;
  std::string model;
  std::string prompt_dir;
  std::string fixtures_dir;
  std::optional<std::size_t> budget;
  std::optional<int> workers;
  bool include_clocks = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_flag("--verbose", opts.verbose, "echo the effective config and per-module stats");
  cmd->add_option("--backend", opts.backend_kind, "backend kind: http|replay|mock-taint");
  cmd->add_option("--endpoint", opts.endpoint, "http backend chat-completions URL");
  cmd->add_option("--model", opts.model, "http backend model name");
  cmd->add_option("--prompt-dir", opts.prompt_dir, "prompt template directory");
  cmd->add_option("--fixtures-dir", opts.fixtures_dir, "replay/record fixtures directory");
  cmd->add_option("--budget", opts.budget, "context budget in characters");
  cmd->add_option("--workers", opts.workers, "benchmark worker threads");
  cmd->add_flag("--include-clocks", opts.include_clocks,
                "track taint through event-control signals");
}

// Config file first, then flag overrides.
ToolConfig effective_config(const CommonOptions& opts) {
  ToolConfig cfg = opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  if (!opts.backend_kind.empty()) {
    if (opts.backend_kind == "http") {
      cfg.backend.kind = BackendKind::Http;
    } else if (opts.backend_kind == "replay") {
      cfg.backend.kind = BackendKind::Replay;
    } else if (opts.backend_kind == "mock-taint") {
      cfg.backend.kind = BackendKind::MockTaint;
    } else {
      throw ConfigError("unknown backend kind '" + opts.backend_kind + "'");
    }
  }
  if (!opts.endpoint.empty()) cfg.backend.endpoint = opts.endpoint;
  if (!opts.model.empty()) cfg.backend.model = opts.model;
  if (!opts.prompt_dir.empty()) cfg.prompt_dir = opts.prompt_dir;
  if (!opts.fixtures_dir.empty()) cfg.backend.fixtures_dir = opts.fixtures_dir;
  if (opts.budget) cfg.context_budget_chars = *opts.budget;
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.include_clocks) cfg.include_clocks = true;
  validate_config(cfg);
  return cfg;
}

void echo_config(const ToolConfig& cfg) {
  nlohmann::ordered_json j;
  j["backend"] = {{"kind", backend_kind_name(cfg.backend.kind)},
                  {"endpoint", cfg.backend.endpoint},
                  {"model", cfg.backend.model},
                  {"api_key_env", cfg.backend.api_key_env},
                  {"temperature", cfg.backend.temperature},
                  {"max_retries", cfg.backend.max_retries},
                  {"timeout_seconds", cfg.backend.timeout_seconds},
                  {"fixtures_dir", cfg.backend.fixtures_dir}};
  j["techniques"] = cfg.techniques;
  j["prompt_dir"] = cfg.prompt_dir;
  j["context_budget_chars"] = cfg.context_budget_chars;
  j["include_clocks"] = cfg.include_clocks;
  j["workers"] = cfg.workers;
  std::cerr << "effective config: " << j.dump() << "\n";
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << to_string(d) << "\n";
}

std::vector<AssetSeed> parse_assets(const std::vector<std::string>& specs) {
  std::vector<AssetSeed> seeds;
  for (const auto& s : specs) {
    AssetSeed seed;
    auto first = s.find(':');
    if (first == std::string::npos)
      throw ConfigError("asset '" + s + "' must be module:signal[:label]");
    auto second = s.find(':', first + 1);
    seed.module = s.substr(0, first);
    if (second == std::string::npos) {
      seed.signal = s.substr(first + 1);
      seed.label = seed.signal;
    } else {
      seed.signal = s.substr(first + 1, second - first - 1);
      seed.label = s.substr(second + 1);
    }
    if (seed.module.empty() || seed.signal.empty())
      throw ConfigError("asset '" + s + "' must be module:signal[:label]");
    seeds.push_back(std::move(seed));
  }
  return seeds;
}

std::string pick_top(const SourceUnit& unit, const std::string& requested) {
  if (!requested.empty()) {
    if (!unit.find_module(requested))
      throw ConfigError("top module '" + requested + "' not found in the sources");
    return requested;
  }
  std::vector<std::string> roots = root_modules(unit);
  if (roots.size() == 1) return roots.front();
  if (roots.empty()) throw ConfigError("no top candidate: every module is instantiated");
  std::string all;
  for (const auto& r : roots) {
    if (!all.empty()) all += ", ";
    all += r;
  }
  throw ConfigError("ambiguous top module (candidates: " + all + "); pass --top");
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file: " + out_path);
  out << text;
}

struct Loaded {
  SourceUnit unit;
  DesignGraph graph;
  Schedule schedule;
};

Loaded load_design(const std::vector<std::string>& sources) {
  Loaded d;
  d.unit = load_unit(sources);
  print_diagnostics(d.unit.diagnostics);
  HierarchyResult hier = resolve_hierarchy(d.unit);
  print_diagnostics(hier.diagnostics);
  d.graph = build_graph(hier.links, d.unit.module_names());
  d.schedule = topo_sort(d.graph);
  return d;
}

LeakageReport analyze_design(const Loaded& d, const ToolConfig& cfg,
                             const std::vector<AssetSeed>& seeds, const std::string& top,
                             const std::string& mode, Backend& backend,
                             const PromptTemplates& templates, bool verbose) {
  AnalysisContext ctx;
  ctx.techniques = templates.techniques;
  ctx.budget_chars = cfg.context_budget_chars;
  (void)seeds;

  if (mode == "monolithic") return run_monolithic(d.unit, ctx, backend, templates);

  PipelineResult pr = run_pipeline(d.unit, d.graph, d.schedule, backend, templates, ctx);
  if (verbose) {
    for (const auto& s : pr.stats) {
      std::cerr << "module " << s.module << ": " << s.wall_ms << " ms, prompt "
                << s.prompt_chars << " chars, response " << s.response_chars << " chars\n";
    }
  }
  (void)top;
  return run_integration(pr.context, d.graph, backend, templates);
}

int finish_report(const LeakageReport& report, const DesignGraph& g,
                  const std::string& out_path) {
  std::vector<Violation> violations = validate_report(report, g);
  write_output(report_to_json(report), out_path);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "validation: " << v.code << ": " << v.message << "\n";
    std::cerr << "verdict: report failed validation\n";
    return kExitValidation;
  }
  if (report.vulnerability_found) {
    std::string path;
    for (const auto& m : report.leakage_path) {
      if (!path.empty()) path += " -> ";
      path += m;
    }
    std::cerr << "verdict: leakage found (path: " << path << ")\n";
    return kExitLeakage;
  }
  std::cerr << "verdict: no leakage\n";
  return kExitClean;
}

int cmd_analyze(const std::vector<std::string>& sources, const std::string& top_opt,
                const std::vector<std::string>& asset_specs, const std::string& out_path,
                const std::string& mode, const CommonOptions& common) {
  ToolConfig cfg = effective_config(common);
  if (common.verbose) echo_config(cfg);
  if (asset_specs.empty())
    throw ConfigError("at least one --assets module:signal[:label] seed is required");
  std::vector<AssetSeed> seeds = parse_assets(asset_specs);

  Loaded d = load_design(sources);
  std::string top = pick_top(d.unit, top_opt);

  // Seeds are validated up front so a typo is a usage error, not a backend one.
  TaintOptions topts{cfg.include_clocks};
  propagate(d.unit, d.graph, seeds, topts);

  MockSources mock{&d.unit, &d.graph, seeds, top, topts};
  std::unique_ptr<Backend> backend = make_backend(cfg.backend, &mock);
  PromptTemplates templates = load_templates(cfg.prompt_dir, cfg.techniques);

  LeakageReport report =
      analyze_design(d, cfg, seeds, top, mode, *backend, templates, common.verbose);
  return finish_report(report, d.graph, out_path);
}

int cmd_graph(const std::vector<std::string>& sources, bool dot, const std::string& out_path) {
  Loaded d = load_design(sources);
  write_output(dot ? graph_to_dot(d.graph, d.schedule) : graph_to_json(d.graph, d.schedule),
               out_path);
  return kExitClean;
}

int cmd_taint(const std::vector<std::string>& sources,
              const std::vector<std::string>& asset_specs, bool provenance,
              const std::string& out_path, const CommonOptions& common) {
  ToolConfig cfg = effective_config(common);
  if (common.verbose) echo_config(cfg);
  if (asset_specs.empty())
    throw ConfigError("at least one --assets module:signal[:label] seed is required");
  std::vector<AssetSeed> seeds = parse_assets(asset_specs);

  Loaded d = load_design(sources);
  TaintState state = propagate(d.unit, d.graph, seeds, TaintOptions{cfg.include_clocks});

  nlohmann::ordered_json j;
  auto instances = nlohmann::ordered_json::array();
  for (const auto& inst : state.instances) {
    nlohmann::ordered_json signals = nlohmann::ordered_json::object();
    for (const auto& [key, tags] : state.tags) {
      if (key.first != inst.path || tags.empty()) continue;
      signals[key.second] = tags;
    }
    if (signals.empty()) continue;
    nlohmann::ordered_json entry;
    entry["path"] = inst.path;
    entry["module"] = inst.module_name;
    entry["signals"] = std::move(signals);
    if (provenance) {
      nlohmann::ordered_json chains = nlohmann::ordered_json::object();
      for (const auto& [key, tags] : state.tags) {
        if (key.first != inst.path || tags.empty()) continue;
        auto chain = state.chain(key.first, key.second);
        auto hops = nlohmann::ordered_json::array();
        for (const auto& [hop_key, kind] : chain)
          hops.push_back(hop_key.second + "@" + hop_key.first + " (" + kind + ")");
        chains[key.second] = std::move(hops);
      }
      entry["provenance"] = std::move(chains);
    }
    instances.push_back(std::move(entry));
  }
  j["taint"] = std::move(instances);
  write_output(j.dump(2) + "\n", out_path);
  return kExitClean;
}

int cmd_bench(const std::string& manifest_path, const std::string& mode,
              const std::string& out_path, const std::string& format, bool timings,
              const CommonOptions& common) {
  ToolConfig cfg = effective_config(common);
  if (common.verbose) echo_config(cfg);
  BenchmarkManifest manifest = load_manifest(manifest_path);

  std::vector<Metrics> all;
  if (mode == "divide-and-conquer" || mode == "both")
    all.push_back(run_benchmarks(manifest, cfg, BenchMode::DivideAndConquer));
  if (mode == "monolithic" || mode == "both")
    all.push_back(run_benchmarks(manifest, cfg, BenchMode::Monolithic));
  if (all.empty())
    throw ConfigError("unknown mode '" + mode +
                      "' (expected divide-and-conquer, monolithic, or both)");

  write_output(emit_metrics(all, format == "table" ? MetricsFormat::Table
                                                   : MetricsFormat::Json,
                            timings),
               out_path);
  return kExitClean;
}

int cmd_record(const std::vector<std::string>& sources, const std::string& top_opt,
               const std::vector<std::string>& asset_specs, const std::string& out_path,
               bool force, const CommonOptions& common) {
  ToolConfig cfg = effective_config(common);
  if (common.verbose) echo_config(cfg);
  if (cfg.backend.kind != BackendKind::Http)
    throw ConfigError("record requires an http backend (there is nothing to record "
                      "from replay or mock-taint)");
  std::string dir = cfg.backend.fixtures_dir;
  if (dir.empty()) throw ConfigError("record requires --fixtures-dir");
  if (fs::is_directory(dir) && !fs::is_empty(dir) && !force)
    throw ConfigError("fixtures directory '" + dir +
                      "' is not empty; pass --force to overwrite");
  if (asset_specs.empty())
    throw ConfigError("at least one --assets module:signal[:label] seed is required");
  std::vector<AssetSeed> seeds = parse_assets(asset_specs);

  Loaded d = load_design(sources);
  std::string top = pick_top(d.unit, top_opt);
  propagate(d.unit, d.graph, seeds, TaintOptions{cfg.include_clocks});

  std::unique_ptr<Backend> backend =
      make_recording_backend(make_backend(cfg.backend, nullptr), dir);
  PromptTemplates templates = load_templates(cfg.prompt_dir, cfg.techniques);

  LeakageReport report = analyze_design(d, cfg, seeds, top, "divide-and-conquer", *backend,
                                        templates, common.verbose);
  std::cerr << "fixtures written to " << dir << "\n";
  int code = finish_report(report, d.graph, out_path);
  return code == kExitLeakage ? kExitClean : code;  // record succeeds on either verdict
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"LLM-assisted information flow tracking for RTL designs"};
  app.set_version_flag("--version", "iftrace 0.1.0");
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "run the full leakage analysis");
  std::vector<std::string> an_sources;
  std::string an_top, an_out, an_mode = "divide-and-conquer";
  std::vector<std::string> an_assets;
  CommonOptions an_common;
  analyze->add_option("sources", an_sources, "Verilog source files")->required();
  analyze->add_option("--top", an_top, "top module (default: the unique uninstantiated one)");
  analyze->add_option("--assets", an_assets, "asset seeds, module:signal[:label]");
  analyze->add_option("--out", an_out, "report output path (default: stdout)");
  analyze->add_option("--mode", an_mode, "divide-and-conquer|monolithic")
      ->check(CLI::IsMember({"divide-and-conquer", "monolithic"}));
  add_common(analyze, an_common);

  // graph
  auto* graph = app.add_subcommand("graph", "emit the module dependency graph");
  std::vector<std::string> gr_sources;
  std::string gr_out;
  bool gr_dot = false, gr_json = false;
  graph->add_option("sources", gr_sources, "Verilog source files")->required();
  graph->add_flag("--dot", gr_dot, "DOT output");
  graph->add_flag("--json", gr_json, "JSON output (default)");
  graph->add_option("--out", gr_out, "output path (default: stdout)");

  // taint
  auto* taint = app.add_subcommand("taint", "run the deterministic net-level taint engine");
  std::vector<std::string> ta_sources, ta_assets;
  std::string ta_out;
  bool ta_prov = false;
  CommonOptions ta_common;
  taint->add_option("sources", ta_sources, "Verilog source files")->required();
  taint->add_option("--assets", ta_assets, "asset seeds, module:signal[:label]");
  taint->add_flag("--provenance", ta_prov, "include taint provenance chains");
  taint->add_option("--out", ta_out, "output path (default: stdout)");
  add_common(taint, ta_common);

  // bench
  auto* bench = app.add_subcommand("bench", "run a labeled benchmark manifest");
  std::string be_manifest, be_out, be_mode = "divide-and-conquer", be_format = "json";
  bool be_timings = false;
  CommonOptions be_common;
  bench->add_option("--manifest", be_manifest, "benchmark manifest JSON")->required();
  bench->add_option("--mode", be_mode, "divide-and-conquer|monolithic|both")
      ->check(CLI::IsMember({"divide-and-conquer", "monolithic", "both"}));
  bench->add_option("--format", be_format, "json|table")
      ->check(CLI::IsMember({"json", "table"}));
  bench->add_flag("--timings", be_timings, "include wall times in JSON output");
  bench->add_option("--out", be_out, "output path (default: stdout)");
  add_common(bench, be_common);

  // record
  auto* record = app.add_subcommand("record", "capture live backend responses as fixtures");
  std::vector<std::string> re_sources, re_assets;
  std::string re_top, re_out;
  bool re_force = false;
  CommonOptions re_common;
  record->add_option("sources", re_sources, "Verilog source files")->required();
  record->add_option("--top", re_top, "top module");
  record->add_option("--assets", re_assets, "asset seeds, module:signal[:label]");
  record->add_option("--out", re_out, "report output path (default: stdout)");
  record->add_flag("--force", re_force, "overwrite existing fixtures");
  add_common(record, re_common);

  std::vector<std::string> argv(args);
  try {
    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitClean;
  } catch (const CLI::CallForVersion& e) {
    std::cout << app.version() << "\n";
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed())
      return cmd_analyze(an_sources, an_top, an_assets, an_out, an_mode, an_common);
    if (graph->parsed()) return cmd_graph(gr_sources, gr_dot && !gr_json, gr_out);
    if (taint->parsed())
      return cmd_taint(ta_sources, ta_assets, ta_prov, ta_out, ta_common);
    if (bench->parsed())
      return cmd_bench(be_manifest, be_mode, be_out, be_format, be_timings, be_common);
    if (record->parsed())
      return cmd_record(re_sources, re_top, re_assets, re_out, re_force, re_common);
  } catch (const PipelineError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const TransportError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const FixtureMissError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace iftrace
