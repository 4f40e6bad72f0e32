#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mixenc/backend.hpp"
#include "mixenc/tokens.hpp"

namespace mixenc::backend {

/// Live chat-completion backend settings. The credential is read from the
/// named environment variable at call time and never stored or logged.
struct HttpBackendConfig {
    std::string base_url;  // e.g. "http://localhost:8080/v1"
    std::string model = "gpt-4";
    std::string credential_env = "OPENAI_API_KEY";
    int timeout_ms = 30000;
    int max_attempts = 3;            // transport/5xx errors only
    int initial_backoff_ms = 500;    // doubled per retry
    int top_logprobs = 20;           // score window for label extraction
    // Label -> canonical first token. Labels absent from the table use the
    // label text itself. First tokens must be pairwise distinct.
    std::map<std::string, std::string> label_tokens;
};

/// OpenAI-style chat-completions client: POST {base_url}/chat/completions
/// with a single user message. Safe for concurrent complete() calls.
class HttpBackend : public ChatBackend {
  public:
    explicit HttpBackend(HttpBackendConfig config, TokenCounter counter = default_token_counter());

    ChatResponse complete(const ChatRequest& request) override;

    /// Exact JSON body sent on the wire for a request (golden-file tested).
    std::string request_body_json(const ChatRequest& request) const;

    /// True when the backend answers a trivial probe request; used for the
    /// gateway startup check.
    bool probe() const override;

  private:
    HttpBackendConfig config_;
    TokenCounter counter_;
    std::string origin_;       // scheme://host:port
    std::string path_prefix_;  // path part of base_url, if any

    std::string credential() const;
    ChatResponse parse_response(const ChatRequest& request, const std::string& body,
                                double latency_ms) const;
};

}  // namespace mixenc::backend
