#include <atomic>
#include <chrono>
#include <cstdint>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "mixenc/eval.hpp"
#include "mixenc/gateway.hpp"

namespace mixenc::gateway {

namespace {

using nlohmann::json;

std::string fresh_request_id() {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint64_t run_tag = [] {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }();
    std::ostringstream out;
    out << "req-" << std::hex << run_tag << "-" << std::dec << counter.fetch_add(1);
    return out.str();
}

std::string request_id_for(const httplib::Request& req) {
    if (req.has_header("X-Request-Id")) {
        const std::string incoming = req.get_header_value("X-Request-Id");
        if (!incoming.empty()) return incoming;
    }
    return fresh_request_id();
}

json usage_json(const backend::Usage& usage) {
    return {{"input_tokens", usage.input_tokens}, {"output_tokens", usage.output_tokens}};
}

json audit_json(const defense::Audit& audit) {
    json calls = json::array();
    for (const auto& call : audit.calls) {
        json entry = {{"prompt", call.prompt},
                      {"response", call.response},
                      {"ok", call.ok},
                      {"usage", usage_json(call.usage)}};
        if (!call.ok) entry["error"] = call.error;
        calls.push_back(std::move(entry));
    }
    json out = {{"strategy", std::string(defense::strategy_name(audit.strategy.kind))},
                {"calls", std::move(calls)},
                {"cost_units", eval::cost_units(audit)},
                {"total_input_tokens", audit.total_input_tokens},
                {"total_output_tokens", audit.total_output_tokens},
                {"failed_calls", audit.failed_calls()}};
    if (audit.final_label.has_value()) {
        out["final_label"] = *audit.final_label;
    }
    return out;
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& request_id,
                const std::string& message, const json& field = nullptr,
                const json& audit = nullptr) {
    json body = {{"error", {{"message", message}, {"field", field}}},
                 {"request_id", request_id}};
    if (!audit.is_null()) body["audit"] = audit;
    send_json(res, status, body);
}

struct WireRequest {
    prompting::UserTask task;
    prompting::ExternalDocument doc;
    bool include_audit = false;
};

// Pulls the typed request out of the body; `field_error` names the first
// offending field on failure.
std::optional<WireRequest> parse_wire(const std::string& body, std::string& field_error,
                                      std::string& message) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        field_error = "";
        message = std::string("request body is not valid JSON: ") + e.what();
        return std::nullopt;
    }
    if (!doc.is_object()) {
        field_error = "";
        message = "request body must be a JSON object";
        return std::nullopt;
    }

    auto missing = [&](const char* name) {
        field_error = name;
        message = std::string("field \"") + name + "\" is required and must be a string";
        return std::nullopt;
    };

    WireRequest wire;
    if (!doc.contains("instruction") || !doc["instruction"].is_string()) {
        return missing("instruction");
    }
    wire.task.instruction = doc["instruction"].get<std::string>();
    if (wire.task.instruction.empty()) {
        field_error = "instruction";
        message = "field \"instruction\" must be non-empty";
        return std::nullopt;
    }

    if (!doc.contains("external_text") || !doc["external_text"].is_string()) {
        return missing("external_text");
    }
    wire.doc.content = doc["external_text"].get<std::string>();

    if (!doc.contains("task_kind") || !doc["task_kind"].is_string()) {
        return missing("task_kind");
    }
    const std::string kind = doc["task_kind"].get<std::string>();
    if (kind == "classification") {
        wire.task.task_kind = prompting::TaskKind::Classification;
    } else if (kind == "generation") {
        wire.task.task_kind = prompting::TaskKind::Generation;
    } else {
        field_error = "task_kind";
        message = "task_kind must be \"classification\" or \"generation\"";
        return std::nullopt;
    }

    if (doc.contains("label_set")) {
        if (!doc["label_set"].is_array()) {
            field_error = "label_set";
            message = "label_set must be an array of strings";
            return std::nullopt;
        }
        for (const auto& label : doc["label_set"]) {
            if (!label.is_string()) {
                field_error = "label_set";
                message = "label_set must be an array of strings";
                return std::nullopt;
            }
            wire.task.label_set.push_back(label.get<std::string>());
        }
    }

    if (doc.contains("include_audit")) {
        if (!doc["include_audit"].is_boolean()) {
            field_error = "include_audit";
            message = "include_audit must be a boolean";
            return std::nullopt;
        }
        wire.include_audit = doc["include_audit"].get<bool>();
    }

    try {
        prompting::validate_task(wire.task);
    } catch (const prompting::PromptError& e) {
        field_error = "label_set";
        message = e.what();
        return std::nullopt;
    }
    return wire;
}

int status_for(backend::ErrorKind kind) {
    return kind == backend::ErrorKind::Timeout ? 504 : 502;
}

}  // namespace

std::string audit_json_text(const defense::Audit& audit, int indent) {
    return audit_json(audit).dump(indent);
}

struct Server::Impl {
    httplib::Server http;
};

Server::Server(Config config, std::unique_ptr<backend::ChatBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)), impl_(std::make_unique<Impl>()) {
    validate_config(config_);

    impl_->http.Get("/healthz", [](const httplib::Request& req, httplib::Response& res) {
        res.set_header("X-Request-Id", request_id_for(req));
        send_json(res, 200, json{{"status", "ok"}});
    });

    impl_->http.Post("/v1/defend", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string request_id = request_id_for(req);
        res.set_header("X-Request-Id", request_id);

        std::string field_error;
        std::string message;
        const auto wire = parse_wire(req.body, field_error, message);
        if (!wire.has_value()) {
            send_error(res, 400, request_id, message,
                       field_error.empty() ? json(nullptr) : json(field_error));
            return;
        }

        defense::Options options;
        options.max_output_tokens = config_.max_output_tokens;
        options.parallelism = config_.parallelism;

        try {
            defense::Audit audit;
            std::string final_text;
            if (wire->task.task_kind == prompting::TaskKind::Classification) {
                auto [index, out] = defense::defend_classification(wire->task, wire->doc,
                                                                   config_.strategy, *backend_,
                                                                   options);
                audit = std::move(out);
                final_text = wire->task.label_set[index];
                if (audit.failed_calls() == audit.calls.size()) {
                    send_error(res, 502, request_id, "backend failed on every path", nullptr,
                               wire->include_audit ? audit_json(audit) : json(nullptr));
                    return;
                }
            } else {
                auto [text, out] = defense::defend_generation(wire->task, wire->doc,
                                                              config_.strategy, *backend_,
                                                              options);
                audit = std::move(out);
                final_text = std::move(text);
            }
            json body = {{"final", final_text}, {"request_id", request_id}};
            if (wire->include_audit) body["audit"] = audit_json(audit);
            send_json(res, 200, body);
        } catch (const defense::DefenseFailure& e) {
            send_error(res, status_for(e.kind()), request_id, e.what(), nullptr,
                       wire->include_audit ? audit_json(e.audit()) : json(nullptr));
        } catch (const backend::BackendError& e) {
            send_error(res, status_for(e.kind()), request_id, e.what());
        }
    });

    impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.has_header("X-Request-Id")) {
            res.set_header("X-Request-Id", request_id_for(req));
        }
        if (res.body.empty()) {
            send_json(res, res.status,
                      json{{"error", {{"message", "no such endpoint"}, {"field", nullptr}}}});
        }
    });

    impl_->http.set_exception_handler(
        [](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
            const std::string request_id = request_id_for(req);
            res.set_header("X-Request-Id", request_id);
            std::string message = "internal error";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            send_error(res, 500, request_id, message);
        });
}

Server::~Server() { stop(); }

bool Server::start() {
    if (serve_thread_.joinable()) return false;  // already running
    if (config_.listen_port == 0) {
        bound_port_ = impl_->http.bind_to_any_port(config_.listen_host);
        if (bound_port_ < 0) return false;
    } else {
        if (!impl_->http.bind_to_port(config_.listen_host, config_.listen_port)) return false;
        bound_port_ = config_.listen_port;
    }
    serve_thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
    for (int i = 0; i < 1000 && !impl_->http.is_running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return impl_->http.is_running();
}

void Server::join_serve_thread() {
    // stop() and wait() may race from different threads; only one may join.
    std::lock_guard<std::mutex> lock(join_mutex_);
    if (serve_thread_.joinable()) serve_thread_.join();
}

void Server::stop() {
    if (impl_) impl_->http.stop();
    join_serve_thread();
}

void Server::wait() { join_serve_thread(); }

}  // namespace mixenc::gateway
