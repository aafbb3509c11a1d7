#include <doctest.h>

#include <atomic>
#include <functional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "iftrace/backend.hpp"
#include "iftrace/parser.hpp"

using namespace iftrace;

namespace {

PromptBundle sample_prompt(const std::string& subject = "m",
                           const std::string& schema = "finding") {
  PromptBundle p;
  p.system_text = "system text";
  p.user_text = "user text for " + subject;
  p.expected_schema = schema;
  p.subject = subject;
  return p;
}

// Minimal chat-completions stub; `handler` decides status and content.
class StubServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(int request_no,
                                                            const std::string& body)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      int n = ++requests_;
      auto [status, content] = handler_(n, req.body);
      res.status = status;
      if (status == 200) {
        nlohmann::json j;
        j["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}}}};
        res.set_content(j.dump(), "application/json");
      } else {
        res.set_content(content, "text/plain");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }
  int requests() const { return requests_; }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
};

BackendConfig http_config(const std::string& endpoint, int max_retries = 0) {
  BackendConfig cfg;
  cfg.kind = BackendKind::Http;
  cfg.endpoint = endpoint;
  cfg.model = "test-model";
  cfg.max_retries = max_retries;
  cfg.timeout_seconds = 5;
  return cfg;
}

}  // namespace

TEST_CASE("prompt fingerprints are stable and split-sensitive") {
  PromptBundle a = sample_prompt();
  CHECK(prompt_fingerprint(a) == prompt_fingerprint(a));
  CHECK(prompt_fingerprint(a).size() == 64);
  PromptBundle b = a;
  b.system_text = "system text ";  // move one char across the boundary
  b.user_text = "user text for m";
  CHECK(prompt_fingerprint(a) != prompt_fingerprint(b));
}

TEST_CASE("replay backend returns recorded bytes and misses loudly") {
  testsupport::TempDir dir;
  PromptBundle p = sample_prompt();
  std::string recorded = "recorded response \xF0\x9F\x94\x91 bytes";
  testsupport::write_file(dir.str(prompt_fingerprint(p) + ".txt"), recorded);

  BackendConfig cfg;
  cfg.kind = BackendKind::Replay;
  cfg.fixtures_dir = dir.str();
  auto backend = make_backend(cfg);
  CHECK(backend->invoke(p) == recorded);

  PromptBundle other = sample_prompt("other");
  CHECK_THROWS_AS(backend->invoke(other), FixtureMissError);
}

TEST_CASE("mock-taint backend answers finding prompts from the fixpoint") {
  SourceUnit unit = make_unit({{"aes_top.v", testsupport::read_file(testsupport::suite_path(
                                                 "aes_tsc_trojan/aes_top.v"))}});
  auto hier = resolve_hierarchy(unit);
  DesignGraph g = build_graph(hier.links, unit.module_names());
  MockSources mock{&unit, &g, {{"top", "KEY", "key"}}, "top", {}};

  BackendConfig cfg;  // mock-taint is the default kind
  auto backend = make_backend(cfg, &mock);
  std::string raw = backend->invoke(sample_prompt("TSC"));
  CHECK(raw.find("\"source\":\"key\"") != std::string::npos);
  CHECK(raw.find("\"sink\":\"load\"") != std::string::npos);

  std::string report_raw = backend->invoke(sample_prompt("", "report"));
  CHECK(report_raw.find("\"vulnerability_found\": true") != std::string::npos);
}

TEST_CASE("http backend speaks the chat-completions wire format") {
  std::string seen_body;
  StubServer server([&](int, const std::string& body) {
    seen_body = body;
    return std::make_pair(200, std::string("the reply"));
  });
  auto backend = make_backend(http_config(server.endpoint()));
  std::string out = backend->invoke(sample_prompt());
  CHECK(out == "the reply");

  nlohmann::json j = nlohmann::json::parse(seen_body);
  CHECK(j["model"] == "test-model");
  CHECK(j["temperature"] == 0.0);
  REQUIRE(j["messages"].size() == 2);
  CHECK(j["messages"][0]["role"] == "system");
  CHECK(j["messages"][0]["content"] == "system text");
  CHECK(j["messages"][1]["role"] == "user");
}

TEST_CASE("http backend retries 5xx with backoff and then recovers") {
  StubServer server([](int n, const std::string&) {
    if (n < 2) return std::make_pair(500, std::string("boom"));
    return std::make_pair(200, std::string("recovered"));
  });
  auto backend = make_backend(http_config(server.endpoint(), /*max_retries=*/2));
  CHECK(backend->invoke(sample_prompt()) == "recovered");
  CHECK(server.requests() == 2);
}

TEST_CASE("http backend gives up after max_retries+1 attempts on persistent 500") {
  StubServer server([](int, const std::string&) {
    return std::make_pair(500, std::string("boom"));
  });
  auto backend = make_backend(http_config(server.endpoint(), /*max_retries=*/1));
  CHECK_THROWS_AS(backend->invoke(sample_prompt()), TransportError);
  CHECK(server.requests() == 2);
}

TEST_CASE("4xx other than 429 fails immediately without retry") {
  StubServer server([](int, const std::string&) {
    return std::make_pair(401, std::string("unauthorized"));
  });
  auto backend = make_backend(http_config(server.endpoint(), /*max_retries=*/3));
  CHECK_THROWS_AS(backend->invoke(sample_prompt()), TransportError);
  CHECK(server.requests() == 1);
}

TEST_CASE("unreachable endpoint is a TransportError") {
  auto backend = make_backend(http_config("http://127.0.0.1:1/v1/chat/completions"));
  CHECK_THROWS_AS(backend->invoke(sample_prompt()), TransportError);
}

TEST_CASE("recording backend captures fixtures replay can serve") {
  testsupport::TempDir dir;
  StubServer server([](int, const std::string&) {
    return std::make_pair(200, std::string("canned answer"));
  });
  auto recorder =
      make_recording_backend(make_backend(http_config(server.endpoint())), dir.str());
  PromptBundle p = sample_prompt();
  CHECK(recorder->invoke(p) == "canned answer");

  BackendConfig replay;
  replay.kind = BackendKind::Replay;
  replay.fixtures_dir = dir.str();
  auto replayer = make_backend(replay);
  CHECK(replayer->invoke(p) == "canned answer");
}
