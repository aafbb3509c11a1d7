#include "iftrace/finding.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include <json.hpp>

#include "json_extract.hpp"

namespace iftrace {

using nlohmann::json;
using nlohmann::ordered_json;

SchemaError::SchemaError(std::string raw, std::string failure)
    : std::runtime_error("schema violation: " + failure),
      raw_(std::move(raw)),
      failure_(std::move(failure)) {}

const char* flow_scope_name(FlowScope s) {
  return s == FlowScope::Internal ? "internal" : "external";
}

const char* const kFindingSchemaText =
    "{\n"
    "  \"sensitive_sources\": [\"<signal or asset name>\", ...],\n"
    "  \"influenced_assets\": [\"<signal name>\", ...],\n"
    "  \"transformations\": [\"<description of logic applied to the data>\", ...],\n"
    "  \"flows\": [{\"source\": \"<signal>\", \"sink\": \"<signal>\", "
    "\"scope\": \"internal\" | \"external\"}, ...]\n"
    "}";

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

namespace detail {

// First balanced {...} span that parses as JSON; empty optional otherwise.
std::optional<json> extract_json_object(const std::string& raw) {
  for (std::size_t start = raw.find('{'); start != std::string::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          json parsed = json::parse(raw.substr(start, i - start + 1), nullptr,
                                    /*allow_exceptions=*/false);
          if (!parsed.is_discarded() && parsed.is_object()) return parsed;
          break;  // balanced but not valid JSON: try the next '{'
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> string_list(const json& j, const std::string& key,
                                     const std::string& raw) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;  // missing lists default to empty
  const json& v = j.at(key);
  if (!v.is_array()) throw SchemaError(raw, "key '" + key + "' must be a list");
  for (const auto& item : v) {
    if (!item.is_string())
      throw SchemaError(raw, "key '" + key + "' must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace detail

ModuleFinding parse_finding(const std::string& raw, const std::string& module,
                            const ModuleDecl* decl) {
  auto obj = detail::extract_json_object(raw);
  if (!obj) throw SchemaError(raw, "no JSON object found in reply");
  const json& j = *obj;

  ModuleFinding f;
  f.module = module;
  f.sensitive_sources = detail::string_list(j, "sensitive_sources", raw);
  f.influenced_assets = detail::string_list(j, "influenced_assets", raw);
  f.transformations = detail::string_list(j, "transformations", raw);

  if (j.contains("flows")) {
    const json& flows = j.at("flows");
    if (!flows.is_array()) throw SchemaError(raw, "key 'flows' must be a list");
    for (const auto& item : flows) {
      if (!item.is_object()) throw SchemaError(raw, "flow entries must be objects");
      Flow fl;
      if (!item.contains("source") || !item.at("source").is_string())
        throw SchemaError(raw, "flow entry missing string key 'source'");
      if (!item.contains("sink") || !item.at("sink").is_string())
        throw SchemaError(raw, "flow entry missing string key 'sink'");
      fl.source = item.at("source").get<std::string>();
      fl.sink = item.at("sink").get<std::string>();
      if (fl.source.empty() || fl.sink.empty())
        throw SchemaError(raw, "flow source and sink must be nonempty");
      if (item.contains("scope")) {
        if (!item.at("scope").is_string())
          throw SchemaError(raw, "flow 'scope' must be a string");
        std::string scope = lower(item.at("scope").get<std::string>());
        if (scope == "internal") {
          fl.scope = FlowScope::Internal;
        } else if (scope == "external") {
          fl.scope = FlowScope::External;
        } else {
          throw SchemaError(raw, "flow 'scope' must be internal or external, got '" +
                                     scope + "'");
        }
      }
      f.flows.push_back(std::move(fl));
    }
  }

  // Normalize signal names to their declared case.
  if (decl) {
    std::map<std::string, std::string> canon;
    std::set<std::string> ambiguous;
    auto add = [&](const std::string& name) {
      std::string key = lower(name);
      auto [it, inserted] = canon.emplace(key, name);
      if (!inserted && it->second != name) ambiguous.insert(key);
    };
    for (const auto& p : decl->ports) add(p.name);
    for (const auto& n : decl->nets) add(n.name);
    auto fix = [&](std::string& name) {
      auto it = canon.find(lower(name));
      if (it != canon.end() && !ambiguous.count(lower(name))) name = it->second;
    };
    for (auto& s : f.sensitive_sources) fix(s);
    for (auto& s : f.influenced_assets) fix(s);
    for (auto& fl : f.flows) {
      fix(fl.source);
      fix(fl.sink);
    }
  }

  return f;
}

std::string finding_to_json(const ModuleFinding& f, bool include_module) {
  ordered_json j;
  if (include_module) j["module"] = f.module;
  j["sensitive_sources"] = f.sensitive_sources;
  j["influenced_assets"] = f.influenced_assets;
  j["transformations"] = f.transformations;
  auto flows = ordered_json::array();
  for (const auto& fl : f.flows) {
    ordered_json o;
    o["source"] = fl.source;
    o["sink"] = fl.sink;
    o["scope"] = flow_scope_name(fl.scope);
    flows.push_back(std::move(o));
  }
  j["flows"] = std::move(flows);
  return j.dump();
}

}  // namespace iftrace
