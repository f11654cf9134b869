#pragma once

#include "spasp/llm/prompt.hpp"
#include "spasp/llm/transcript.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spasp::llm {

enum class GatewayErrorKind : std::uint8_t {
  network,           // connection failure or retryable status after all retries
  http_status,       // non-retryable HTTP status
  bad_response,      // body is not a chat completion
  fingerprint_miss,  // replay: prompt not in the transcript
  script_exhausted,  // mock: no scripted response left
  config,            // missing endpoint, credentials, ...
};

std::string_view to_string(GatewayErrorKind kind);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& detail);
  GatewayErrorKind kind() const { return kind_; }

 private:
  GatewayErrorKind kind_;
};

struct CompletionParams {
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 1024;
};

struct Completion {
  std::string text;
  double latency_ms = 0.0;
  std::string fingerprint;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string_view name() const = 0;
  /// Blocking; safe to call from several threads at once.
  virtual Completion complete(const std::string& prompt, const CompletionParams& params) = 0;
};

/// OpenAI-compatible POST {base_url}/chat/completions.
struct LiveConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
  /// Replaceable for tests.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config);
  std::string_view name() const override { return "live"; }
  Completion complete(const std::string& prompt, const CompletionParams& params) override;

  /// Attempts made so far, retries included.
  std::size_t attempts() const { return attempts_.load(); }

 private:
  LiveConfig config_;
  std::string scheme_host_;
  std::string path_prefix_;
  std::atomic<std::size_t> attempts_{0};
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(Transcript transcript);
  std::string_view name() const override { return "replay"; }
  Completion complete(const std::string& prompt, const CompletionParams& params) override;

 private:
  Transcript transcript_;
};

struct MockCall {
  std::size_t index = 0;  // 0-based, in arrival order
  std::string model_id;
  std::string prompt;
};

/// Scripted responses: either a fixed sequence consumed by call index, or a
/// responder that sees each call (nullopt means the script has nothing).
class MockBackend : public Backend {
 public:
  using Responder = std::function<std::optional<std::string>(const MockCall&)>;

  explicit MockBackend(std::vector<std::string> sequence);
  explicit MockBackend(Responder responder);
  /// NDJSON rules: {"match": "<substring>", "response": "..."} (first match
  /// wins) or {"index": n, "response": "..."}.
  static std::unique_ptr<MockBackend> from_rules(std::string_view ndjson);

  std::string_view name() const override { return "mock"; }
  Completion complete(const std::string& prompt, const CompletionParams& params) override;

  std::size_t calls() const { return next_index_.load(); }

 private:
  Responder responder_;
  std::atomic<std::size_t> next_index_{0};
};

/// Renders templates, calls the backend and records every completion.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, const PromptLibrary* library = nullptr,
                   std::shared_ptr<TranscriptRecorder> recorder = nullptr);

  Completion complete(const PromptRequest& request);
  Completion complete_text(const std::string& prompt, const CompletionParams& params);

  const PromptLibrary& library() const { return *library_; }
  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  const PromptLibrary* library_;
  std::shared_ptr<TranscriptRecorder> recorder_;
};

}  // namespace spasp::llm
