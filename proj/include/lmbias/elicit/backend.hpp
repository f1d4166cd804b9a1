#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lmbias/error.hpp"

namespace lmbias::elicit {

struct GenerationParams {
    std::string model_id;
    int max_tokens = 10;
    double temperature = 0.0;

    void validate() const;  // throws ConfigError
};

struct ChatMessage {
    std::string role;  // "system" | "user"
    std::string content;
};

// Chat-completion request body:
// {"model", "messages":[{"role","content"}], "max_tokens", "temperature"}.
struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    int max_tokens = 10;
    double temperature = 0.0;

    static ChatRequest single_user_turn(const GenerationParams& params, std::string prompt);
    nlohmann::json to_json() const;
    static ChatRequest from_json(const nlohmann::json& body);  // throws ParseError
};

class TransportError : public Error {
public:
    TransportError(const std::string& what, bool retryable) : Error(what), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

// A model endpoint. Implementations must be safe to call from several
// threads at once.
class Backend {
public:
    virtual ~Backend() = default;

    // Identifies the endpoint in cache keys.
    virtual std::string id() const = 0;

    // Raw assistant text. Throws TransportError on failure.
    virtual std::string complete(const ChatRequest& request) = 0;
};

}  // namespace lmbias::elicit
