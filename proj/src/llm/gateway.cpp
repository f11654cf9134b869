#include "spasp/llm/gateway.hpp"

#include "httplib.h"
#include "json.hpp"

#include <thread>

namespace spasp::llm {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {
    "network", "http_status", "bad_response", "fingerprint_miss", "script_exhausted", "config",
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string clip(const std::string& s, std::size_t n = 200) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

std::string_view to_string(GatewayErrorKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

GatewayError::GatewayError(GatewayErrorKind kind, const std::string& detail)
    : std::runtime_error("GATEWAY(" + std::string(to_string(kind)) + "): " + detail), kind_(kind) {}

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw GatewayError(GatewayErrorKind::config, "base URL is not set");
  if (config_.api_key.empty()) throw GatewayError(GatewayErrorKind::config, "API key is not set");
  std::size_t scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) {
    throw GatewayError(GatewayErrorKind::config, "base URL needs a scheme: " + config_.base_url);
  }
  std::size_t slash = config_.base_url.find('/', scheme + 3);
  scheme_host_ = config_.base_url.substr(0, slash);
  if (slash != std::string::npos) path_prefix_ = config_.base_url.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Completion LiveBackend::complete(const std::string& prompt, const CompletionParams& params) {
  nlohmann::ordered_json body;
  body["model"] = params.model_id;
  body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  const std::string payload = body.dump();
  const std::string path = path_prefix_ + "/chat/completions";
  httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};

  auto start = std::chrono::steady_clock::now();
  auto backoff = config_.initial_backoff;
  std::string last_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      config_.sleep(backoff);
      backoff *= 2;
    }
    ++attempts_;
    // One client per call: httplib clients are not safe for concurrent use.
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_failure = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw GatewayError(GatewayErrorKind::http_status,
                         "HTTP " + std::to_string(res->status) + ": " + clip(res->body));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      std::string text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      return {std::move(text), elapsed_ms(start), fingerprint(params.model_id, prompt)};
    } catch (const nlohmann::json::exception& err) {
      throw GatewayError(GatewayErrorKind::bad_response, std::string(err.what()) + ": " + clip(res->body));
    }
  }
  throw GatewayError(GatewayErrorKind::network, "gave up after " + std::to_string(config_.max_retries + 1) +
                                                    " attempts, last: " + last_failure);
}

ReplayBackend::ReplayBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

Completion ReplayBackend::complete(const std::string& prompt, const CompletionParams& params) {
  std::string fp = fingerprint(params.model_id, prompt);
  const TranscriptEntry* entry = transcript_.find(fp);
  if (!entry) {
    throw GatewayError(GatewayErrorKind::fingerprint_miss,
                       "no transcript entry for fingerprint " + fp + " (model '" + params.model_id + "')");
  }
  return {entry->response, entry->latency_ms, fp};
}

MockBackend::MockBackend(std::vector<std::string> sequence)
    : responder_([seq = std::move(sequence)](const MockCall& call) -> std::optional<std::string> {
        if (call.index < seq.size()) return seq[call.index];
        return std::nullopt;
      }) {}

MockBackend::MockBackend(Responder responder) : responder_(std::move(responder)) {}

std::unique_ptr<MockBackend> MockBackend::from_rules(std::string_view ndjson) {
  struct Rule {
    std::optional<std::string> match;
    std::optional<std::size_t> index;
    std::string response;
  };
  std::vector<Rule> rules;
  std::size_t line_no = 0;
  while (!ndjson.empty()) {
    ++line_no;
    std::size_t nl = ndjson.find('\n');
    std::string_view line = ndjson.substr(0, nl);
    ndjson = nl == std::string_view::npos ? std::string_view{} : ndjson.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Rule r;
      r.response = j.at("response").get<std::string>();
      if (j.contains("match")) r.match = j["match"].get<std::string>();
      if (j.contains("index")) r.index = j["index"].get<std::size_t>();
      if (!r.match && !r.index) throw std::invalid_argument("rule needs 'match' or 'index'");
      rules.push_back(std::move(r));
    } catch (const std::exception& err) {
      throw GatewayError(GatewayErrorKind::config,
                         "mock rules line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return std::make_unique<MockBackend>([rules = std::move(rules)](const MockCall& call) -> std::optional<std::string> {
    for (const auto& r : rules) {
      if (r.index && *r.index != call.index) continue;
      if (r.match && call.prompt.find(*r.match) == std::string::npos) continue;
      return r.response;
    }
    return std::nullopt;
  });
}

Completion MockBackend::complete(const std::string& prompt, const CompletionParams& params) {
  MockCall call{next_index_++, params.model_id, prompt};
  auto response = responder_(call);
  if (!response) {
    throw GatewayError(GatewayErrorKind::script_exhausted,
                       "no scripted response for call " + std::to_string(call.index));
  }
  return {std::move(*response), 0.0, fingerprint(params.model_id, prompt)};
}

Gateway::Gateway(std::shared_ptr<Backend> backend, const PromptLibrary* library,
                 std::shared_ptr<TranscriptRecorder> recorder)
    : backend_(std::move(backend)),
      library_(library ? library : &PromptLibrary::builtin()),
      recorder_(std::move(recorder)) {}

Completion Gateway::complete(const PromptRequest& request) {
  return complete_text(library_->render(request),
                       CompletionParams{request.model_id, request.temperature, request.max_tokens});
}

Completion Gateway::complete_text(const std::string& prompt, const CompletionParams& params) {
  Completion c = backend_->complete(prompt, params);
  if (recorder_) {
    recorder_->record({c.fingerprint, params.model_id, prompt, c.text, c.latency_ms, utc_timestamp()});
  }
  return c;
}

}  // namespace spasp::llm
