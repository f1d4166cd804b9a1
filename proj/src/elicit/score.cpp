#include "lmbias/elicit/score.hpp"

#include <stdexcept>

namespace lmbias::elicit {

ScoreOutcome ScoreOutcome::valid(int score) { return valid(score, std::to_string(score)); }

ScoreOutcome ScoreOutcome::valid(int score, std::string raw) {
    if (score < 1 || score > 5) throw std::invalid_argument("score outside 1..5");
    ScoreOutcome s;
    s.score_ = score;
    s.raw_ = std::move(raw);
    return s;
}

ScoreOutcome ScoreOutcome::no_response(std::string raw) {
    ScoreOutcome s;
    s.raw_ = std::move(raw);
    return s;
}

ScoreOutcome parse_score(std::string_view raw, const ParseOptions& options) {
    const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0;
    while (i < raw.size()) {
        if (!is_digit(raw[i])) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < raw.size() && is_digit(raw[i])) ++i;
        const auto token = raw.substr(start, i - start);

        // Leading zeros are part of the value ("05" is 5); long runs can't be 1–5.
        const auto nz = token.find_first_not_of('0');
        const auto digits = nz == std::string_view::npos ? std::string_view{} : token.substr(nz);
        if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '5') {
            return ScoreOutcome::valid(digits[0] - '0', std::string(raw));
        }
        if (!options.scan_past_invalid) break;
    }
    return ScoreOutcome::no_response(std::string(raw));
}

std::optional<int> compute_bias(const ScoreOutcome& unnamed, const ScoreOutcome& named) {
    if (!unnamed.is_valid() || !named.is_valid()) return std::nullopt;
    return named.score() - unnamed.score();
}

}  // namespace lmbias::elicit
