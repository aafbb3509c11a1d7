#include "iftrace/report.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "json_extract.hpp"

namespace iftrace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* leakage_type_name(LeakageType t) {
  switch (t) {
    case LeakageType::Confidentiality: return "confidentiality";
    case LeakageType::Integrity: return "integrity";
    case LeakageType::TimingSideChannel: return "timing_side_channel";
    case LeakageType::None: return "none";
    case LeakageType::Other: return "other";
  }
  return "other";
}

const char* const kReportSchemaText =
    "{\n"
    "  \"vulnerability_found\": true | false,\n"
    "  \"vulnerable_modules\": [\"<module>\", ...],\n"
    "  \"leakage_path\": [\"<module>\", ...],\n"
    "  \"leakage_type\": \"confidentiality\" | \"integrity\" | \"timing_side_channel\" | "
    "\"none\" | \"other\",\n"
    "  \"explanation\": \"<how the leak occurs>\",\n"
    "  \"transformations\": [{\"from_module\": \"<module>\", \"source\": \"<signal>\", "
    "\"sink\": \"<signal>\", \"to_module\": \"<module>\"}, ...]\n"
    "}";

LeakageReport parse_report(const std::string& raw) {
  auto obj = detail::extract_json_object(raw);
  if (!obj) throw SchemaError(raw, "no JSON object found in reply");
  const json& j = *obj;

  LeakageReport r;
  if (!j.contains("vulnerability_found") || !j.at("vulnerability_found").is_boolean())
    throw SchemaError(raw, "missing boolean key 'vulnerability_found'");
  r.vulnerability_found = j.at("vulnerability_found").get<bool>();

  r.vulnerable_modules = detail::string_list(j, "vulnerable_modules", raw);
  r.leakage_path = detail::string_list(j, "leakage_path", raw);

  std::string type_text;
  if (j.contains("leakage_type")) {
    if (!j.at("leakage_type").is_string())
      throw SchemaError(raw, "key 'leakage_type' must be a string");
    type_text = j.at("leakage_type").get<std::string>();
  }

  if (j.contains("explanation")) {
    if (!j.at("explanation").is_string())
      throw SchemaError(raw, "key 'explanation' must be a string");
    r.explanation = j.at("explanation").get<std::string>();
  }

  if (type_text.empty()) {
    r.leakage_type = r.vulnerability_found ? LeakageType::Other : LeakageType::None;
  } else if (type_text == "confidentiality") {
    r.leakage_type = LeakageType::Confidentiality;
  } else if (type_text == "integrity") {
    r.leakage_type = LeakageType::Integrity;
  } else if (type_text == "timing_side_channel") {
    r.leakage_type = LeakageType::TimingSideChannel;
  } else if (type_text == "none") {
    r.leakage_type = LeakageType::None;
  } else if (type_text == "other") {
    r.leakage_type = LeakageType::Other;
  } else {
    r.leakage_type = LeakageType::Other;
    if (!r.explanation.empty()) r.explanation += " ";
    r.explanation += "(reported leakage_type: \"" + type_text + "\")";
  }

  if (j.contains("transformations")) {
    const json& ts = j.at("transformations");
    if (!ts.is_array()) throw SchemaError(raw, "key 'transformations' must be a list");
    for (const auto& item : ts) {
      if (!item.is_object())
        throw SchemaError(raw, "transformation entries must be objects");
      ReportTransform t;
      for (const char* key : {"from_module", "source", "sink", "to_module"}) {
        if (!item.contains(key) || !item.at(key).is_string())
          throw SchemaError(raw, std::string("transformation entry missing string key '") +
                                     key + "'");
      }
      t.from_module = item.at("from_module").get<std::string>();
      t.source = item.at("source").get<std::string>();
      t.sink = item.at("sink").get<std::string>();
      t.to_module = item.at("to_module").get<std::string>();
      r.transformations.push_back(std::move(t));
    }
  }
  return r;
}

std::string report_to_json(const LeakageReport& r) {
  ordered_json j;
  j["vulnerability_found"] = r.vulnerability_found;
  j["vulnerable_modules"] = r.vulnerable_modules;
  j["leakage_path"] = r.leakage_path;
  j["leakage_type"] = leakage_type_name(r.leakage_type);
  j["explanation"] = r.explanation;
  auto ts = ordered_json::array();
  for (const auto& t : r.transformations) {
    ordered_json o;
    o["from_module"] = t.from_module;
    o["source"] = t.source;
    o["sink"] = t.sink;
    o["to_module"] = t.to_module;
    ts.push_back(std::move(o));
  }
  j["transformations"] = std::move(ts);
  return j.dump(2) + "\n";
}

std::vector<Violation> validate_report(const LeakageReport& r, const DesignGraph& g) {
  std::vector<Violation> out;

  if (!r.vulnerability_found) {
    if (!r.vulnerable_modules.empty())
      out.push_back({"InconsistentVerdict",
                     "vulnerability_found is false but vulnerable_modules is nonempty"});
    if (!r.leakage_path.empty())
      out.push_back({"InconsistentVerdict",
                     "vulnerability_found is false but leakage_path is nonempty"});
    if (!r.transformations.empty())
      out.push_back({"InconsistentVerdict",
                     "vulnerability_found is false but transformations is nonempty"});
    if (r.leakage_type != LeakageType::None)
      out.push_back({"InconsistentVerdict",
                     std::string("vulnerability_found is false but leakage_type is ") +
                         leakage_type_name(r.leakage_type)});
  } else {
    if (r.leakage_path.empty())
      out.push_back({"InconsistentVerdict",
                     "vulnerability_found is true but leakage_path is empty"});
  }

  auto check_module = [&](const std::string& m, const std::string& where) {
    if (!g.has_node(m))
      out.push_back({"UnknownModule", where + " names unknown module '" + m + "'"});
  };
  for (const auto& m : r.leakage_path) check_module(m, "leakage_path");
  for (const auto& m : r.vulnerable_modules) check_module(m, "vulnerable_modules");
  for (const auto& t : r.transformations) {
    check_module(t.from_module, "transformations");
    check_module(t.to_module, "transformations");
  }

  for (std::size_t i = 0; i + 1 < r.leakage_path.size(); ++i) {
    const std::string& a = r.leakage_path[i];
    const std::string& b = r.leakage_path[i + 1];
    if (!g.has_node(a) || !g.has_node(b)) continue;  // already reported
    if (!g.edges.count({a, b}) && !g.edges.count({b, a}))
      out.push_back({"DisconnectedPath", "leakage_path steps '" + a + "' and '" + b +
                                             "' are not connected in the design graph"});
  }
  return out;
}

LeakageReport report_from_taint(const TaintState& state, const std::string& top) {
  LeakageReport r;
  std::vector<std::string> exposed = state.tainted_output_ports(top);
  if (exposed.empty()) {
    r.vulnerability_found = false;
    r.leakage_type = LeakageType::None;
    r.explanation = "No seeded asset reaches an output port of module '" + top + "'.";
    return r;
  }
  r.vulnerability_found = true;
  r.leakage_type = LeakageType::Confidentiality;

  auto module_of = [&](const std::string& path) -> std::string {
    for (const auto& inst : state.instances)
      if (inst.path == path) return inst.module_name;
    return path;
  };

  const InstanceNode* root = state.root_of(top);
  std::set<std::string> labels;
  std::vector<std::string> origins;

  bool first_port = true;
  for (const auto& port : exposed) {
    for (const auto& tag : state.tags_for(root->path, port)) labels.insert(tag);
    auto chain = state.chain(root->path, port);
    if (chain.empty()) continue;

    const auto& origin = chain.front().first;
    std::string origin_text = origin.second + " in " + module_of(origin.first);
    if (std::find(origins.begin(), origins.end(), origin_text) == origins.end())
      origins.push_back(origin_text);

    // Module path: chain hops with consecutive duplicates collapsed.
    if (first_port) {
      for (const auto& [key, kind] : chain) {
        std::string m = module_of(key.first);
        if (r.leakage_path.empty() || r.leakage_path.back() != m)
          r.leakage_path.push_back(m);
      }
      first_port = false;
    }

    // Transformations: each hop becomes a (from_module, source, sink,
    // to_module) step; an intra-module hop whose sink immediately crosses a
    // boundary is attributed to the receiving module.
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const auto& prev = chain[i - 1].first;
      const auto& cur = chain[i].first;
      const std::string& kind = chain[i].second;
      ReportTransform t;
      t.from_module = module_of(prev.first);
      t.source = prev.second;
      t.sink = cur.second;
      if (kind == "port") {
        t.to_module = module_of(cur.first);
      } else if (i + 1 < chain.size() && chain[i + 1].second == "port") {
        t.to_module = module_of(chain[i + 1].first.first);
      } else {
        t.to_module = module_of(cur.first);
      }
      if (std::find(r.transformations.begin(), r.transformations.end(), t) ==
          r.transformations.end())
        r.transformations.push_back(std::move(t));
    }
  }

  for (const auto& m : r.leakage_path) {
    if (std::find(r.vulnerable_modules.begin(), r.vulnerable_modules.end(), m) ==
        r.vulnerable_modules.end())
      r.vulnerable_modules.push_back(m);
  }

  std::string label_text;
  for (const auto& l : labels) {
    if (!label_text.empty()) label_text += ", ";
    label_text += l;
  }
  std::string port_text;
  for (const auto& p : exposed) {
    if (!port_text.empty()) port_text += ", ";
    port_text += p;
  }
  std::string origin_text;
  for (const auto& o : origins) {
    if (!origin_text.empty()) origin_text += ", ";
    origin_text += o;
  }
  r.explanation = "Asset tag(s) [" + label_text + "] seeded at " + origin_text +
                  " reach top-level output port(s) [" + port_text + "] of module '" + top +
                  "'.";
  return r;
}

}  // namespace iftrace
