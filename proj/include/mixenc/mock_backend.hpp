#pragma once

#include <memory>
#include <mutex>
#include <regex>
#include <string>
#include <vector>

#include "mixenc/backend.hpp"
#include "mixenc/tokens.hpp"

namespace mixenc::backend {

/// One scripted rule: a regex matched against the prompt text, a canned
/// response, optional canned label scores, or a scripted failure.
struct MockRule {
    std::string pattern;
    std::string response;
    std::vector<double> label_scores;  // aligned with the request's label set
    bool has_scores = false;
    bool fail = false;
    std::string error_message = "scripted failure";
};

/// Deterministic script for the mock backend; the first matching rule wins.
struct MockScript {
    std::vector<MockRule> rules;
    std::string default_response = "OK";

    static MockScript from_json_text(std::string_view text);
    static MockScript load(const std::string& path);
};

/// Scriptable offline backend. Identical script + request sequence produces
/// byte-identical responses at any concurrency level. Usage is filled from
/// the local token estimator.
class MockBackend : public ChatBackend {
  public:
    explicit MockBackend(MockScript script, TokenCounter counter = default_token_counter());

    ChatResponse complete(const ChatRequest& request) override;

  private:
    struct CompiledRule {
        MockRule rule;
        std::regex regex;
    };

    MockScript script_;
    std::vector<CompiledRule> compiled_;
    TokenCounter counter_;
    mutable std::mutex match_mutex_;  // rule matching is serialized
};

}  // namespace mixenc::backend
