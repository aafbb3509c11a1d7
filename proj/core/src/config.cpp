#include "iftrace/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef IFTRACE_DEFAULT_DATA_DIR
#define IFTRACE_DEFAULT_DATA_DIR ""
#endif

namespace iftrace {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}

std::string default_data_dir() { return IFTRACE_DEFAULT_DATA_DIR; }

ToolConfig default_config() {
  ToolConfig cfg;
  cfg.prompt_dir = default_data_dir() + "/templates";
  return cfg;
}

namespace {

BackendKind backend_kind_from(const std::string& name) {
  if (name == "http") return BackendKind::Http;
  if (name == "replay") return BackendKind::Replay;
  if (name == "mock-taint") return BackendKind::MockTaint;
  throw ConfigError("unknown backend kind '" + name +
                    "' (expected http, replay, or mock-taint)");
}

}  // namespace

ToolConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config file is not a JSON object: " + path);

  ToolConfig cfg = default_config();

  if (j.contains("backend")) {
    const json& b = j.at("backend");
    if (!b.is_object()) throw ConfigError("'backend' must be an object");
    if (b.contains("kind")) cfg.backend.kind = backend_kind_from(b.at("kind").get<std::string>());
    if (b.contains("endpoint")) cfg.backend.endpoint = b.at("endpoint").get<std::string>();
    if (b.contains("model")) cfg.backend.model = b.at("model").get<std::string>();
    if (b.contains("api_key_env")) cfg.backend.api_key_env = b.at("api_key_env").get<std::string>();
    if (b.contains("temperature")) cfg.backend.temperature = b.at("temperature").get<double>();
    if (b.contains("max_retries")) cfg.backend.max_retries = b.at("max_retries").get<int>();
    if (b.contains("timeout_seconds"))
      cfg.backend.timeout_seconds = b.at("timeout_seconds").get<int>();
    if (b.contains("fixtures_dir")) cfg.backend.fixtures_dir = b.at("fixtures_dir").get<std::string>();
  }
  if (j.contains("techniques")) {
    cfg.techniques.clear();
    for (const auto& t : j.at("techniques")) cfg.techniques.push_back(t.get<std::string>());
  }
  if (j.contains("prompt_dir")) cfg.prompt_dir = j.at("prompt_dir").get<std::string>();
  if (j.contains("context_budget_chars"))
    cfg.context_budget_chars = j.at("context_budget_chars").get<std::size_t>();
  if (j.contains("include_clocks")) cfg.include_clocks = j.at("include_clocks").get<bool>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();

  return cfg;
}

void validate_config(const ToolConfig& cfg) {
  if (cfg.context_budget_chars < 1000)
    throw ConfigError("context_budget_chars must be at least 1000");
  if (cfg.workers < 1) throw ConfigError("workers must be a positive integer");
  if (cfg.techniques.empty()) throw ConfigError("at least one technique is required");
  if (!fs::is_directory(cfg.prompt_dir))
    throw ConfigError("prompt_dir does not exist: " + cfg.prompt_dir);
  switch (cfg.backend.kind) {
    case BackendKind::Http:
      if (cfg.backend.endpoint.empty())
        throw ConfigError("http backend requires 'endpoint'");
      if (cfg.backend.model.empty()) throw ConfigError("http backend requires 'model'");
      break;
    case BackendKind::Replay:
      if (cfg.backend.fixtures_dir.empty())
        throw ConfigError("replay backend requires 'fixtures_dir'");
      if (!fs::is_directory(cfg.backend.fixtures_dir))
        throw ConfigError("fixtures_dir does not exist: " + cfg.backend.fixtures_dir);
      break;
    case BackendKind::MockTaint:
      break;
  }
}

}  // namespace iftrace
