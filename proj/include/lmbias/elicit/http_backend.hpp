#pragma once

#include <chrono>
#include <string>

#include "lmbias/elicit/backend.hpp"

namespace lmbias::elicit {

struct HttpBackendConfig {
    std::string name;
    // Full URL of the chat-completions endpoint, http:// or https://.
    std::string endpoint;
    // Environment variable holding the bearer token; empty sends no
    // Authorization header (local servers).
    std::string api_key_env;
    std::chrono::seconds timeout{60};
};

// OpenAI-compatible chat-completions client. 429 and 5xx responses, and
// connection failures, are reported as retryable TransportErrors.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string id() const override { return config_.name; }
    std::string complete(const ChatRequest& request) override;

private:
    HttpBackendConfig config_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
    std::string api_key_;
};

}  // namespace lmbias::elicit
