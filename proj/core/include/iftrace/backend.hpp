#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/graph.hpp"
#include "iftrace/prompt.hpp"
#include "iftrace/taint.hpp"

namespace iftrace {

enum class BackendKind { Http, Replay, MockTaint };

struct BackendConfig {
  BackendKind kind = BackendKind::MockTaint;
  std::string endpoint;  // http: chat-completions URL
  std::string model;
  std::string api_key_env = "LLM_IFT_API_KEY";
  double temperature = 0.0;
  int max_retries = 2;
  int timeout_seconds = 60;
  std::string fixtures_dir;  // replay: recorded responses
};

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what);
};

class FixtureMissError : public std::runtime_error {
 public:
  explicit FixtureMissError(const std::string& key);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  // Raw response text for a prompt. May throw TransportError / FixtureMissError.
  virtual std::string invoke(const PromptBundle& p) = 0;
};

// Inputs the offline deterministic backend computes its answers from.
struct MockSources {
  const SourceUnit* unit = nullptr;
  const DesignGraph* graph = nullptr;
  std::vector<AssetSeed> seeds;
  std::string top;
  TaintOptions taint;
};

// http: OpenAI-compatible chat completions, bearer token from the named
//       environment variable, exponential backoff (1 s base) on transport
//       errors and HTTP 429/5xx, up to max_retries retries.
// replay: responses looked up by prompt fingerprint in fixtures_dir.
// mock-taint: findings and reports derived from the taint fixpoint.
std::unique_ptr<Backend> make_backend(const BackendConfig& cfg,
                                      const MockSources* mock = nullptr);

// Wraps `inner`, writing every (fingerprint -> response) pair into `dir`.
std::unique_ptr<Backend> make_recording_backend(std::unique_ptr<Backend> inner,
                                                const std::string& dir);

// SHA-256 over (system_text, user_text); names replay fixture files.
std::string prompt_fingerprint(const PromptBundle& p);

const char* backend_kind_name(BackendKind k);

}  // namespace iftrace
