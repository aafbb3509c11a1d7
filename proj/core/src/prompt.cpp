#include "iftrace/prompt.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iftrace/finding.hpp"
#include "iftrace/report.hpp"

namespace iftrace {

namespace fs = std::filesystem;

const ModuleFinding* AnalysisContext::find(const std::string& module) const {
  for (const auto& f : findings)
    if (f.module == module) return &f;
  return nullptr;
}

TemplateError::TemplateError(const std::string& what) : std::runtime_error(what) {}

MissingAncestorFinding::MissingAncestorFinding(const std::string& module,
                                               const std::string& ancestor)
    : std::runtime_error("cannot formulate prompt for '" + module + "': ancestor '" +
                         ancestor + "' has no finding yet") {}

IncompleteContext::IncompleteContext(const std::string& missing_module)
    : std::runtime_error("context is incomplete: no finding for module '" +
                         missing_module + "'") {}

namespace {

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw TemplateError("cannot read template file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string list_or_none(const std::vector<std::string>& items) {
  return items.empty() ? "(none)" : join(items, ", ");
}

std::string techniques_text(const std::vector<Technique>& techniques) {
  std::string out;
  for (const auto& t : techniques) {
    out += "[" + t.name + "]\n" + t.definition;
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += '\n';
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out.empty() ? "(none)" : out;
}

std::string adjacency_text(const DesignGraph& g, const Schedule& sched) {
  std::string out;
  for (const auto& n : sched.order) {
    out += "- " + n + " -> " + list_or_none(g.adjacency.at(n)) + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

// Serialized findings, oldest first, elided from the front to fit `budget`.
std::string context_text(const std::vector<const ModuleFinding*>& findings,
                         std::size_t budget) {
  if (findings.empty()) return "(none)";
  std::vector<std::string> lines;
  std::size_t total = 0;
  for (const ModuleFinding* f : findings) {
    lines.push_back(finding_to_json(*f));
    total += lines.back().size() + 1;
  }
  std::size_t elided = 0;
  while (total > budget && elided < lines.size()) {
    total -= lines[elided].size() + 1;
    ++elided;
  }
  std::string out;
  if (elided > 0) out += "[elided " + std::to_string(elided) + " findings]\n";
  for (std::size_t i = elided; i < lines.size(); ++i) {
    out += lines[i];
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out.empty() ? "(none)" : out;
}

}  // namespace

PromptTemplates load_templates(const std::string& dir,
                               const std::vector<std::string>& technique_names) {
  fs::path base(dir);
  if (!fs::is_directory(base))
    throw TemplateError("template directory does not exist: " + dir);
  PromptTemplates t;
  t.system = read_text_file(base / "system.txt");
  t.module_prompt = read_text_file(base / "module_prompt.txt");
  t.final_prompt = read_text_file(base / "final_prompt.txt");
  t.monolithic_prompt = read_text_file(base / "monolithic_prompt.txt");
  t.repair_prompt = read_text_file(base / "repair_prompt.txt");
  for (const auto& name : technique_names) {
    std::string file = name;
    for (auto& c : file)
      if (c == '-') c = '_';
    t.techniques.push_back(
        Technique{name, read_text_file(base / "techniques" / (file + ".txt"))});
  }
  return t;
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t open = text.find("{{", i);
    if (open == std::string::npos) {
      out.append(text, i, std::string::npos);
      break;
    }
    std::size_t close = text.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(text, i, std::string::npos);
      break;
    }
    out.append(text, i, open - i);
    std::string key = text.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(text, open, close + 2 - open);  // unknown placeholder kept
    }
    i = close + 2;
  }
  return out;
}

PromptBundle formulate_module_prompt(const ModuleDecl& decl, const AnalysisContext& ctx,
                                     const DesignGraph& g, const PromptTemplates& templates) {
  Schedule sched = topo_sort(g);
  std::vector<std::string> anc = ancestors(g, decl.name);
  std::vector<std::string> dep = dependents(g, decl.name);

  std::vector<const ModuleFinding*> ancestor_findings;
  for (const auto& a : anc) {
    const ModuleFinding* f = ctx.find(a);
    if (!f) throw MissingAncestorFinding(decl.name, a);
    ancestor_findings.push_back(f);
  }

  std::string overview;
  if (ctx.findings.empty()) {
    overview = "## Design overview\nTopological order: " + join(sched.order, ", ") +
               "\nDependency adjacency (module -> modules that depend on it):\n" +
               adjacency_text(g, sched) + "\n\n";
  }

  std::map<std::string, std::string> vars = {
      {"design_overview", overview},
      {"module_name", decl.name},
      {"module_source", decl.source_text},
      {"ancestors", list_or_none(anc)},
      {"dependents", list_or_none(dep)},
      {"techniques", techniques_text(ctx.techniques)},
      {"context", context_text(ancestor_findings, ctx.budget_chars)},
      {"schema", kFindingSchemaText},
  };

  PromptBundle p;
  p.system_text = templates.system;
  p.user_text = render_template(templates.module_prompt, vars);
  p.expected_schema = "finding";
  p.subject = decl.name;
  return p;
}

PromptBundle formulate_final_prompt(const AnalysisContext& ctx, const DesignGraph& g,
                                    const PromptTemplates& templates) {
  Schedule sched = topo_sort(g);
  std::vector<const ModuleFinding*> all;
  for (const auto& m : sched.order) {
    const ModuleFinding* f = ctx.find(m);
    if (!f) throw IncompleteContext(m);
    all.push_back(f);
  }

  std::map<std::string, std::string> vars = {
      {"order", join(sched.order, ", ")},
      {"adjacency", adjacency_text(g, sched)},
      {"context", context_text(all, ctx.budget_chars)},
      {"techniques", techniques_text(ctx.techniques)},
      {"schema", kReportSchemaText},
  };

  PromptBundle p;
  p.system_text = templates.system;
  p.user_text = render_template(templates.final_prompt, vars);
  p.expected_schema = "report";
  p.subject.clear();
  return p;
}

PromptBundle formulate_monolithic_prompt(const SourceUnit& unit, const AnalysisContext& ctx,
                                         const PromptTemplates& templates) {
  std::string design;
  for (const auto& m : unit.modules) {
    design += m.source_text;
    design += "\n\n";
  }
  if (!design.empty()) design.erase(design.size() - 2);

  std::map<std::string, std::string> vars = {
      {"design_source", design},
      {"techniques", techniques_text(ctx.techniques)},
      {"schema", kReportSchemaText},
  };

  PromptBundle p;
  p.system_text = templates.system;
  p.user_text = render_template(templates.monolithic_prompt, vars);
  p.expected_schema = "report";
  p.subject.clear();
  return p;
}

PromptBundle formulate_repair_prompt(const PromptBundle& failed, const std::string& failure,
                                     const std::string& raw_reply,
                                     const PromptTemplates& templates) {
  std::map<std::string, std::string> vars = {
      {"schema_name", failed.expected_schema},
      {"error", failure},
      {"raw", raw_reply},
      {"schema", failed.expected_schema == "finding" ? kFindingSchemaText
                                                     : kReportSchemaText},
  };
  PromptBundle p;
  p.system_text = failed.system_text;
  p.user_text = render_template(templates.repair_prompt, vars);
  p.expected_schema = failed.expected_schema;
  p.subject = failed.subject;
  return p;
}

}  // namespace iftrace
