#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixenc/label_distribution.hpp"

namespace mixenc::backend {

struct Usage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

struct ChatRequest {
    std::string prompt;
    bool want_label_scores = false;
    std::vector<std::string> label_set;  // present iff want_label_scores
    int max_output_tokens = 1024;
    double temperature = 0.0;
};

struct ChatResponse {
    std::string text;
    // Present only when requested and derivable; absent means the caller
    // must fall back to parsing the response text.
    std::optional<LabelDistribution> label_distribution;
    Usage usage;
    double latency_ms = 0.0;
};

enum class ErrorKind {
    Unavailable,        // network/HTTP failure, retries exhausted
    MalformedResponse,  // provider payload did not parse
    Timeout,
    ScoreUnavailable,
};

class BackendError : public std::runtime_error {
  public:
    BackendError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    /// Must be safe for concurrent callers.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    /// Startup reachability check; offline backends are always reachable.
    virtual bool probe() const { return true; }
};

/// Per-position outcome of a fan-out call; one failure never aborts siblings.
struct CallResult {
    bool ok = false;
    ChatResponse response;
    std::string error;
    ErrorKind error_kind = ErrorKind::Unavailable;
};

/// Dispatches the requests concurrently (at most `parallelism` in flight)
/// and returns responses positionally aligned with the requests. Results
/// are identical to sequential complete() calls.
std::vector<CallResult> complete_many(ChatBackend& backend,
                                      const std::vector<ChatRequest>& requests,
                                      int parallelism = 3);

}  // namespace mixenc::backend
