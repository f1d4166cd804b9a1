#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>

#include "lmbias/elicit/backend.hpp"
#include "lmbias/elicit/prompts.hpp"

namespace lmbias::elicit {

// Deterministic offline scorer speaking the chat-completion wire format.
//
// Unnamed prompt: clamp(3 + positive_keywords - negative_keywords, 1, 5).
// Named prompt: the same base plus a per-company offset in {-1, 0, +1}
// derived from a hash of the company name, clamped to 1..5. Texts containing
// the word "undetermined" get a non-numeric reply on both prompts, and
// prompts that match neither template are declined as well.
class MockBackend final : public Backend {
public:
    explicit MockBackend(TemplateSet templates);

    std::string id() const override { return "mock"; }
    std::string complete(const ChatRequest& request) override;

    // Wire-level entry point: request JSON in, OpenAI-style response JSON out.
    nlohmann::json handle(const nlohmann::json& request_body);

    std::size_t calls() const { return calls_.load(); }

    static int base_score(std::string_view text);
    static int company_offset(std::string_view company_name);
    static int positive_keywords(std::string_view text);
    static int negative_keywords(std::string_view text);

private:
    TemplateSet templates_;
    std::atomic<std::size_t> calls_{0};
};

// 64-bit FNV-1a; stable across platforms.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace lmbias::elicit
