#include "mixenc/http_backend.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace mixenc::backend {

namespace {

using nlohmann::json;

// Splits "http://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    const std::size_t scheme = base_url.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("base_url must include a scheme: " + base_url);
    }
    const std::size_t slash = base_url.find('/', scheme + 3);
    if (slash == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, slash), prefix};
}

std::string trim_token(std::string_view token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(token[end - 1]))) --end;
    return std::string(token.substr(begin, end - begin));
}

constexpr double kLabelFloor = 1e-6;

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config, TokenCounter counter)
    : config_(std::move(config)), counter_(std::move(counter)) {
    auto [origin, prefix] = split_base_url(config_.base_url);
    origin_ = std::move(origin);
    path_prefix_ = std::move(prefix);

    std::set<std::string> first_tokens;
    for (const auto& [label, token] : config_.label_tokens) {
        if (!first_tokens.insert(trim_token(token)).second) {
            throw std::invalid_argument("label-token table has colliding first tokens: " + token);
        }
    }
}

std::string HttpBackend::credential() const {
    const char* value = std::getenv(config_.credential_env.c_str());
    return value ? value : "";
}

std::string HttpBackend::request_body_json(const ChatRequest& request) const {
    json body = {
        {"model", config_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output_tokens},
    };
    if (request.want_label_scores) {
        body["logprobs"] = true;
        body["top_logprobs"] = config_.top_logprobs;
    }
    return body.dump();
}

bool HttpBackend::probe() const {
    httplib::Client client(origin_);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(2, 0);
    auto res = client.Get(path_prefix_.empty() ? "/" : path_prefix_);
    return static_cast<bool>(res);
}

ChatResponse HttpBackend::parse_response(const ChatRequest& request, const std::string& body,
                                         double latency_ms) const {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error&) {
        throw BackendError(ErrorKind::MalformedResponse, "provider response is not valid JSON");
    }

    ChatResponse response;
    response.latency_ms = latency_ms;
    try {
        const json& choice = j.at("choices").at(0);
        response.text = choice.at("message").at("content").get<std::string>();

        if (j.contains("usage") && j["usage"].is_object()) {
            response.usage.input_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
            response.usage.output_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
        } else {
            // Provider omitted usage; fall back to the local estimator.
            response.usage.input_tokens = counter_(request.prompt);
            response.usage.output_tokens = counter_(response.text);
        }

        if (request.want_label_scores && choice.contains("logprobs") &&
            choice["logprobs"].is_object()) {
            const json& content = choice["logprobs"].value("content", json::array());
            if (!content.empty() && content.at(0).contains("top_logprobs")) {
                std::map<std::string, double> token_probs;
                for (const auto& entry : content.at(0).at("top_logprobs")) {
                    token_probs[trim_token(entry.at("token").get<std::string>())] =
                        std::exp(entry.at("logprob").get<double>());
                }
                std::vector<double> weights;
                weights.reserve(request.label_set.size());
                for (const auto& label : request.label_set) {
                    auto mapped = config_.label_tokens.find(label);
                    const std::string token =
                        trim_token(mapped != config_.label_tokens.end() ? mapped->second : label);
                    auto it = token_probs.find(token);
                    weights.push_back(it != token_probs.end() ? it->second + kLabelFloor
                                                              : kLabelFloor);
                }
                response.label_distribution = LabelDistribution::normalized(std::move(weights));
            }
        }
    } catch (const json::exception& e) {
        throw BackendError(ErrorKind::MalformedResponse,
                           std::string("unexpected provider payload: ") + e.what());
    }
    return response;
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
    const std::string body = request_body_json(request);
    const std::string token = credential();
    httplib::Headers headers;
    if (!token.empty()) {
        headers.emplace("Authorization", "Bearer " + token);
    }

    const auto started = std::chrono::steady_clock::now();
    std::string last_error;
    int backoff_ms = config_.initial_backoff_ms;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

        auto res = client.Post(path_prefix_ + "/chat/completions", headers, body,
                               "application/json");
        const double elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                .count();

        if (res && res->status >= 200 && res->status < 300) {
            return parse_response(request, res->body, elapsed_ms);
        }

        bool retryable = false;
        if (!res) {
            if (elapsed_ms >= config_.timeout_ms) {
                throw BackendError(ErrorKind::Timeout, "backend request timed out");
            }
            last_error = "transport error: " + httplib::to_string(res.error());
            retryable = true;
        } else if (res->status >= 500) {
            last_error = "backend HTTP " + std::to_string(res->status);
            retryable = true;
        } else {
            throw BackendError(ErrorKind::Unavailable,
                               "backend HTTP " + std::to_string(res->status));
        }

        if (!retryable || attempt == config_.max_attempts) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
    }
    throw BackendError(ErrorKind::Unavailable, "retries exhausted: " + last_error);
}

}  // namespace mixenc::backend
