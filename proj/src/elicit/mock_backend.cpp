#include "lmbias/elicit/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace lmbias::elicit {
namespace {

constexpr std::array<std::string_view, 14> kPositive = {
    "increase", "increased", "increases", "rose",   "grew",    "growth",  "improved",
    "improve",  "record",    "higher",    "strong", "gain",    "gains",   "exceeded"};
constexpr std::array<std::string_view, 14> kNegative = {
    "decrease", "decreased", "decreases", "declined", "decline", "fell",  "loss",
    "losses",   "lower",     "weak",      "weaker",   "deteriorated", "shortfall", "dropped"};

constexpr std::string_view kDeclineWord = "undetermined";

template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
    std::string word;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
            word += static_cast<char>(std::tolower(c));
        } else if (!word.empty()) {
            fn(word);
            word.clear();
        }
    }
    if (!word.empty()) fn(word);
}

template <std::size_t N>
int count_words(std::string_view text, const std::array<std::string_view, N>& vocab) {
    int n = 0;
    for_each_word(text, [&](const std::string& w) {
        if (std::find(vocab.begin(), vocab.end(), w) != vocab.end()) ++n;
    });
    return n;
}

bool contains_word(std::string_view text, std::string_view target) {
    bool found = false;
    for_each_word(text, [&](const std::string& w) { found = found || w == target; });
    return found;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

MockBackend::MockBackend(TemplateSet templates) : templates_(std::move(templates)) { templates_.validate(); }

int MockBackend::positive_keywords(std::string_view text) { return count_words(text, kPositive); }
int MockBackend::negative_keywords(std::string_view text) { return count_words(text, kNegative); }

int MockBackend::base_score(std::string_view text) {
    return std::clamp(3 + positive_keywords(text) - negative_keywords(text), 1, 5);
}

int MockBackend::company_offset(std::string_view company_name) {
    return static_cast<int>(fnv1a64(company_name) % 3) - 1;
}

std::string MockBackend::complete(const ChatRequest& request) {
    calls_.fetch_add(1);
    if (request.messages.empty()) return "Cannot determine sentiment.";
    const auto& prompt = request.messages.back().content;

    if (auto named = match_template(templates_.named, prompt)) {
        const auto& text = (*named)["text"];
        if (contains_word(text, kDeclineWord)) return "Cannot determine sentiment.";
        const int base = 3 + positive_keywords(text) - negative_keywords(text);
        return std::to_string(std::clamp(base + company_offset((*named)["company_name"]), 1, 5));
    }
    if (auto unnamed = match_template(templates_.unnamed, prompt)) {
        const auto& text = (*unnamed)["text"];
        if (contains_word(text, kDeclineWord)) return "Cannot determine sentiment.";
        return std::to_string(base_score(text));
    }
    return "Cannot determine sentiment.";
}

nlohmann::json MockBackend::handle(const nlohmann::json& request_body) {
    const auto request = ChatRequest::from_json(request_body);
    const auto content = complete(request);
    return {{"object", "chat.completion"},
            {"model", request.model},
            {"choices", nlohmann::json::array({{{"index", 0},
                                                 {"message", {{"role", "assistant"}, {"content", content}}},
                                                 {"finish_reason", "stop"}}})}};
}

}  // namespace lmbias::elicit
