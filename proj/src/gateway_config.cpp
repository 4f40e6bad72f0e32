#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mixenc/encodings.hpp"
#include "mixenc/gateway.hpp"
#include "mixenc/http_backend.hpp"
#include "mixenc/mock_backend.hpp"

namespace mixenc::gateway {

namespace {

std::string trim(std::string_view text) {
    const std::size_t begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return "";
    const std::size_t end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(begin, end - begin + 1));
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& why) {
    std::ostringstream msg;
    msg << source << ":" << line << ": " << why;
    throw ConfigError(msg.str());
}

int parse_int(const std::string& value, std::string_view source, std::size_t line,
              const std::string& key) {
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        fail(source, line, key + " must be an integer, got \"" + value + "\"");
    }
}

// Keys that would smuggle a secret into the config file. The service only
// ever accepts the NAME of an environment variable (credential_env).
bool looks_like_credential_key(const std::string& key) {
    static constexpr std::array<std::string_view, 10> kBlocked = {
        "api_key",  "apikey",   "key",      "secret",       "token",
        "password", "bearer",   "api_token", "access_token", "credential",
    };
    return std::find(kBlocked.begin(), kBlocked.end(), key) != kBlocked.end();
}

}  // namespace

Config parse_config(std::string_view text, std::string_view source_name) {
    Config config;
    std::size_t line_number = 0;
    std::istringstream stream{std::string(text)};
    std::string raw;
    while (std::getline(stream, raw)) {
        ++line_number;
        const std::size_t comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        const std::size_t equals = line.find('=');
        if (equals == std::string::npos) {
            fail(source_name, line_number, "expected `key = value`, got \"" + line + "\"");
        }
        const std::string key = trim(line.substr(0, equals));
        const std::string value = trim(line.substr(equals + 1));
        if (key.empty()) fail(source_name, line_number, "empty key");

        if (looks_like_credential_key(key)) {
            fail(source_name, line_number,
                 "credentials are not read from the config file; set credential_env to the "
                 "name of an environment variable instead");
        }

        if (key == "listen_host") {
            config.listen_host = value;
        } else if (key == "listen_port") {
            config.listen_port = parse_int(value, source_name, line_number, key);
        } else if (key == "backend") {
            config.backend_kind = value;
        } else if (key == "mock_script") {
            config.mock_script = value;
        } else if (key == "base_url") {
            config.base_url = value;
        } else if (key == "model") {
            config.model = value;
        } else if (key == "credential_env") {
            config.credential_env = value;
        } else if (key == "timeout_ms") {
            config.timeout_ms = parse_int(value, source_name, line_number, key);
        } else if (key == "strategy") {
            const auto parsed = defense::parse_strategy(value, config.strategy.caesar_shift);
            if (!parsed.has_value()) {
                fail(source_name, line_number, "unknown strategy \"" + value + "\"");
            }
            config.strategy.kind = parsed->kind;
        } else if (key == "caesar_shift") {
            config.strategy.caesar_shift = parse_int(value, source_name, line_number, key);
        } else if (key == "parallelism") {
            config.parallelism = parse_int(value, source_name, line_number, key);
        } else if (key == "max_output_tokens") {
            config.max_output_tokens = parse_int(value, source_name, line_number, key);
        } else if (key == "tokenizer") {
            config.tokenizer = value;
        } else {
            fail(source_name, line_number, "unknown key \"" + key + "\"");
        }
    }
    validate_config(config);
    return config;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

void validate_config(const Config& config) {
    if (config.listen_port < 0 || config.listen_port > 65535) {
        throw ConfigError("listen_port must be in [0, 65535]");
    }
    if (config.backend_kind != "mock" && config.backend_kind != "http") {
        throw ConfigError("backend must be \"mock\" or \"http\", got \"" + config.backend_kind +
                          "\"");
    }
    if (config.backend_kind == "http" && config.base_url.empty()) {
        throw ConfigError("the http backend needs base_url");
    }
    if (config.credential_env.empty()) {
        throw ConfigError("credential_env must name an environment variable");
    }
    if (config.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
    if (config.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (config.max_output_tokens < 1) throw ConfigError("max_output_tokens must be at least 1");
    if (config.tokenizer != "bytes") {
        throw ConfigError("unknown tokenizer \"" + config.tokenizer + "\" (supported: bytes)");
    }
    if (config.strategy.caesar_shift < 1 || config.strategy.caesar_shift > 25) {
        throw ConfigError("caesar_shift must be in 1..25");
    }
}

std::unique_ptr<backend::ChatBackend> make_backend(const Config& config) {
    validate_config(config);
    if (config.backend_kind == "mock") {
        backend::MockScript script;
        if (!config.mock_script.empty()) script = backend::MockScript::load(config.mock_script);
        return std::make_unique<backend::MockBackend>(std::move(script));
    }
    backend::HttpBackendConfig http;
    http.base_url = config.base_url;
    http.model = config.model;
    http.credential_env = config.credential_env;
    http.timeout_ms = config.timeout_ms;
    return std::make_unique<backend::HttpBackend>(std::move(http));
}

}  // namespace mixenc::gateway
