#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "lmbias/elicit/http_backend.hpp"

#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

namespace lmbias::elicit {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError(fmt::format("backend '{}': endpoint '{}' has no scheme", config_.name, config_.endpoint));
    }
    const auto scheme = config_.endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError(fmt::format("backend '{}': unsupported scheme '{}'", config_.name, scheme));
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    origin_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError(fmt::format("backend '{}': environment variable {} is not set", config_.name,
                                          config_.api_key_env));
        }
        api_key_ = key;
    }
}

std::string HttpBackend::complete(const ChatRequest& request) {
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const auto res = client.Post(path_, headers, request.to_json().dump(), "application/json");
    if (!res) {
        throw TransportError(fmt::format("{}: request failed: {}", config_.name, httplib::to_string(res.error())), true);
    }
    if (res->status == 429 || res->status >= 500) {
        throw TransportError(fmt::format("{}: HTTP {}", config_.name, res->status), true);
    }
    if (res->status != 200) {
        throw TransportError(fmt::format("{}: HTTP {}: {}", config_.name, res->status, res->body.substr(0, 200)), false);
    }
    try {
        const auto body = nlohmann::json::parse(res->body);
        const auto& content = body.at("choices").at(0).at("message").at("content");
        return content.is_null() ? std::string{} : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(fmt::format("{}: malformed response: {}", config_.name, e.what()), false);
    }
}

}  // namespace lmbias::elicit
