#include "iftrace/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "iftrace/report.hpp"

namespace iftrace {

namespace fs = std::filesystem;

TransportError::TransportError(const std::string& what)
    : std::runtime_error("transport error: " + what) {}

FixtureMissError::FixtureMissError(const std::string& key)
    : std::runtime_error("replay fixture missing for prompt fingerprint " + key),
      key_(key) {}

const char* backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::Http: return "http";
    case BackendKind::Replay: return "replay";
    case BackendKind::MockTaint: return "mock-taint";
  }
  return "mock-taint";
}

std::string prompt_fingerprint(const PromptBundle& p) {
  // Record separator keeps (system, user) splits unambiguous.
  std::string data = p.system_text + '\x1e' + p.user_text;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw TransportError("endpoint URL has no scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

  std::string invoke(const PromptBundle& p) override {
    nlohmann::ordered_json body;
    body["model"] = cfg_.model;
    body["messages"] = nlohmann::ordered_json::array(
        {{{"role", "system"}, {"content", p.system_text}},
         {{"role", "user"}, {"content", p.user_text}}});
    body["temperature"] = cfg_.temperature;
    std::string payload = body.dump();

    ParsedUrl url = split_url(cfg_.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_write_timeout(cfg_.timeout_seconds, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str());
        key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::seconds(1LL << (attempt - 1)));
      httplib::Result res = client.Post(url.path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return extract_content(res->body);
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      throw TransportError("HTTP " + std::to_string(res->status) + " from " +
                           cfg_.endpoint);
    }
    throw TransportError(last_error + " after " + std::to_string(cfg_.max_retries + 1) +
                         " attempts to " + cfg_.endpoint);
  }

 private:
  static std::string extract_content(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw TransportError("backend reply is not JSON");
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
      throw TransportError("backend reply has no choices");
    const auto& first = j["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string())
      throw TransportError("backend reply has no message content");
    return first["message"]["content"].get<std::string>();
  }

  BackendConfig cfg_;
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::string dir) : dir_(std::move(dir)) {}

  std::string invoke(const PromptBundle& p) override {
    std::string key = prompt_fingerprint(p);
    fs::path file = fs::path(dir_) / (key + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw FixtureMissError(key);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  std::string dir_;
};

class MockTaintBackend : public Backend {
 public:
  explicit MockTaintBackend(MockSources sources) : sources_(std::move(sources)) {}

  std::string invoke(const PromptBundle& p) override {
    ensure_state();
    if (p.expected_schema == "finding") {
      ModuleFinding f = finding_from_taint(p.subject, *state_, *sources_.graph);
      return finding_to_json(f);
    }
    LeakageReport r = report_from_taint(*state_, sources_.top);
    return report_to_json(r);
  }

 private:
  void ensure_state() {
    if (!state_)
      state_ = propagate(*sources_.unit, *sources_.graph, sources_.seeds, sources_.taint);
  }

  MockSources sources_;
  std::optional<TaintState> state_;
};

class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::unique_ptr<Backend> inner, std::string dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}

  std::string invoke(const PromptBundle& p) override {
    std::string raw = inner_->invoke(p);
    fs::create_directories(dir_);
    fs::path file = fs::path(dir_) / (prompt_fingerprint(p) + ".txt");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << raw;
    return raw;
  }

 private:
  std::unique_ptr<Backend> inner_;
  std::string dir_;
};

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg, const MockSources* mock) {
  switch (cfg.kind) {
    case BackendKind::Http:
      if (cfg.endpoint.empty() || cfg.model.empty())
        throw TransportError("http backend requires an endpoint and a model");
      return std::make_unique<HttpBackend>(cfg);
    case BackendKind::Replay:
      if (cfg.fixtures_dir.empty())
        throw TransportError("replay backend requires a fixtures directory");
      return std::make_unique<ReplayBackend>(cfg.fixtures_dir);
    case BackendKind::MockTaint:
      if (!mock || !mock->unit || !mock->graph)
        throw std::logic_error("mock-taint backend needs design sources");
      return std::make_unique<MockTaintBackend>(*mock);
  }
  throw std::logic_error("unreachable backend kind");
}

std::unique_ptr<Backend> make_recording_backend(std::unique_ptr<Backend> inner,
                                                const std::string& dir) {
  return std::make_unique<RecordingBackend>(std::move(inner), dir);
}

}  // namespace iftrace
