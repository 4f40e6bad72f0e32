#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>

#include "mixenc/backend.hpp"
#include "mixenc/defense.hpp"

namespace mixenc::gateway {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Service settings, read from a `key = value` text file. The provider
/// credential itself is NEVER accepted here — only the name of the
/// environment variable that holds it.
struct Config {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8787;

    std::string backend_kind = "mock";  // "mock" or "http"
    std::string mock_script;            // optional script path for the mock

    std::string base_url;  // required for the http backend
    std::string model = "gpt-4";
    std::string credential_env = "OPENAI_API_KEY";
    int timeout_ms = 30000;

    defense::Strategy strategy;  // defaults to the mixture defense
    int parallelism = 3;
    int max_output_tokens = 1024;
    std::string tokenizer = "bytes";  // byte-count estimator
};

/// Parses `key = value` lines ('#' starts a comment). Unknown keys are
/// rejected, as is any key that looks like an inline credential.
Config parse_config(std::string_view text, std::string_view source_name = "<memory>");
Config load_config(const std::string& path);
void validate_config(const Config& config);

std::unique_ptr<backend::ChatBackend> make_backend(const Config& config);

/// Audit trail serialized as the API's audit object. indent < 0 gives the
/// compact single-line form.
std::string audit_json_text(const defense::Audit& audit, int indent = -1);

/// HTTP front end: POST /v1/defend runs the configured defense; GET
/// /healthz reports liveness. Every response carries an X-Request-Id
/// header (echoed from the request when the client sent one).
class Server {
  public:
    Server(Config config, std::unique_ptr<backend::ChatBackend> backend);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and serves on a background thread. A configured port of 0
    /// picks a free port, readable via port() afterwards.
    bool start();
    /// Stops listening and joins the serve thread. Safe to call from any
    /// (non-signal-handler) thread, concurrently with wait().
    void stop();
    /// Blocks until the server stops (Ctrl-C handling lives in the caller).
    void wait();
    int port() const { return bound_port_; }

  private:
    struct Impl;

    void join_serve_thread();

    Config config_;
    std::unique_ptr<backend::ChatBackend> backend_;
    std::unique_ptr<Impl> impl_;
    std::thread serve_thread_;
    std::mutex join_mutex_;
    int bound_port_ = -1;
};

}  // namespace mixenc::gateway
