#include "mixenc/mock_backend.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mixenc::backend {

MockScript MockScript::from_json_text(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("mock script is not valid JSON: ") + e.what());
    }
    MockScript script;
    script.default_response = j.value("default_response", std::string("OK"));
    for (const auto& rule_json : j.value("rules", nlohmann::json::array())) {
        MockRule rule;
        rule.pattern = rule_json.at("pattern").get<std::string>();
        rule.response = rule_json.value("response", std::string());
        if (rule_json.contains("label_scores")) {
            rule.label_scores = rule_json.at("label_scores").get<std::vector<double>>();
            rule.has_scores = true;
        }
        rule.fail = rule_json.value("fail", false);
        rule.error_message = rule_json.value("error", std::string("scripted failure"));
        script.rules.push_back(std::move(rule));
    }
    return script;
}

MockScript MockScript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open mock script: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

MockBackend::MockBackend(MockScript script, TokenCounter counter)
    : script_(std::move(script)), counter_(std::move(counter)) {
    compiled_.reserve(script_.rules.size());
    for (const auto& rule : script_.rules) {
        compiled_.push_back(CompiledRule{rule, std::regex(rule.pattern)});
    }
}

ChatResponse MockBackend::complete(const ChatRequest& request) {
    const MockRule* matched = nullptr;
    {
        std::lock_guard<std::mutex> lock(match_mutex_);
        for (const auto& entry : compiled_) {
            if (std::regex_search(request.prompt, entry.regex)) {
                matched = &entry.rule;
                break;
            }
        }
    }
    if (matched && matched->fail) {
        throw BackendError(ErrorKind::Unavailable, matched->error_message);
    }

    ChatResponse response;
    response.text = matched ? matched->response : script_.default_response;
    response.usage.input_tokens = counter_(request.prompt);
    response.usage.output_tokens = counter_(response.text);
    response.latency_ms = 0.0;
    if (request.want_label_scores && matched && matched->has_scores &&
        matched->label_scores.size() == request.label_set.size()) {
        response.label_distribution = LabelDistribution::normalized(matched->label_scores);
    }
    return response;
}

}  // namespace mixenc::backend
