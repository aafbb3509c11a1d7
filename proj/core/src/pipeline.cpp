#include "iftrace/pipeline.hpp"

#include <chrono>

namespace iftrace {

PipelineError::PipelineError(std::string module, const std::string& what)
    : std::runtime_error("module '" + module + "': " + what), module_(std::move(module)) {}

namespace {

// invoke -> parse with a single repair re-prompt on a malformed reply.
template <typename ParseFn>
auto invoke_and_parse(Backend& backend, const PromptBundle& bundle,
                      const PromptTemplates& templates, ParseFn&& parse,
                      std::size_t* prompt_chars, std::size_t* response_chars) {
  std::string raw = backend.invoke(bundle);
  *prompt_chars += bundle.system_text.size() + bundle.user_text.size();
  *response_chars += raw.size();
  try {
    return parse(raw);
  } catch (const SchemaError& first) {
    PromptBundle repair =
        formulate_repair_prompt(bundle, first.failure(), raw, templates);
    std::string retry = backend.invoke(repair);
    *prompt_chars += repair.system_text.size() + repair.user_text.size();
    *response_chars += retry.size();
    return parse(retry);
  }
}

}  // namespace

PipelineResult run_pipeline(const SourceUnit& unit, const DesignGraph& g,
                            const Schedule& schedule, Backend& backend,
                            const PromptTemplates& templates, AnalysisContext initial) {
  PipelineResult result;
  result.context = std::move(initial);
  if (result.context.techniques.empty())
    result.context.techniques = templates.techniques;

  for (const std::string& name : schedule.order) {
    const ModuleDecl* decl = unit.find_module(name);
    if (!decl) throw PipelineError(name, "module is not part of the unit");

    ModuleRunStats stats;
    stats.module = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      PromptBundle bundle =
          formulate_module_prompt(*decl, result.context, g, templates);
      ModuleFinding finding = invoke_and_parse(
          backend, bundle, templates,
          [&](const std::string& raw) { return parse_finding(raw, name, decl); },
          &stats.prompt_chars, &stats.response_chars);
      finding.module = name;
      result.context.findings.push_back(std::move(finding));
    } catch (const SchemaError& e) {
      throw PipelineError(name, e.what());
    } catch (const TransportError& e) {
      throw PipelineError(name, e.what());
    } catch (const FixtureMissError& e) {
      throw PipelineError(name, e.what());
    }
    auto t1 = std::chrono::steady_clock::now();
    stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.stats.push_back(std::move(stats));
  }
  return result;
}

LeakageReport run_integration(const AnalysisContext& ctx, const DesignGraph& g,
                              Backend& backend, const PromptTemplates& templates) {
  try {
    PromptBundle bundle = formulate_final_prompt(ctx, g, templates);
    std::size_t ignored_prompt = 0, ignored_response = 0;
    return invoke_and_parse(
        backend, bundle, templates,
        [&](const std::string& raw) { return parse_report(raw); }, &ignored_prompt,
        &ignored_response);
  } catch (const SchemaError& e) {
    throw PipelineError("<integration>", e.what());
  } catch (const TransportError& e) {
    throw PipelineError("<integration>", e.what());
  } catch (const FixtureMissError& e) {
    throw PipelineError("<integration>", e.what());
  }
}

LeakageReport run_monolithic(const SourceUnit& unit, const AnalysisContext& ctx,
                             Backend& backend, const PromptTemplates& templates) {
  try {
    AnalysisContext local = ctx;
    if (local.techniques.empty()) local.techniques = templates.techniques;
    PromptBundle bundle = formulate_monolithic_prompt(unit, local, templates);
    std::size_t ignored_prompt = 0, ignored_response = 0;
    return invoke_and_parse(
        backend, bundle, templates,
        [&](const std::string& raw) { return parse_report(raw); }, &ignored_prompt,
        &ignored_response);
  } catch (const SchemaError& e) {
    throw PipelineError("<monolithic>", e.what());
  } catch (const TransportError& e) {
    throw PipelineError("<monolithic>", e.what());
  } catch (const FixtureMissError& e) {
    throw PipelineError("<monolithic>", e.what());
  }
}

}  // namespace iftrace
