#include "lmbias/elicit/backend.hpp"

#include <cmath>

#include <fmt/format.h>

namespace lmbias::elicit {

void GenerationParams::validate() const {
    if (model_id.empty()) throw ConfigError("model id must not be empty");
    if (max_tokens <= 0) throw ConfigError(fmt::format("max_tokens must be positive, got {}", max_tokens));
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw ConfigError(fmt::format("temperature must be >= 0, got {}", temperature));
    }
}

ChatRequest ChatRequest::single_user_turn(const GenerationParams& params, std::string prompt) {
    ChatRequest r;
    r.model = params.model_id;
    r.messages.push_back({"user", std::move(prompt)});
    r.max_tokens = params.max_tokens;
    r.temperature = params.temperature;
    return r;
}

nlohmann::json ChatRequest::to_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", model}, {"messages", msgs}, {"max_tokens", max_tokens}, {"temperature", temperature}};
}

ChatRequest ChatRequest::from_json(const nlohmann::json& body) {
    try {
        ChatRequest r;
        r.model = body.at("model").get<std::string>();
        for (const auto& m : body.at("messages")) {
            const auto role = m.at("role").get<std::string>();
            if (role != "system" && role != "user" && role != "assistant") {
                throw ParseError(fmt::format("unsupported message role '{}'", role));
            }
            r.messages.push_back({role, m.at("content").get<std::string>()});
        }
        r.max_tokens = body.at("max_tokens").get<int>();
        r.temperature = body.at("temperature").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("invalid chat request: {}", e.what()));
    }
}

}  // namespace lmbias::elicit
