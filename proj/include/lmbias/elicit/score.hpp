#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace lmbias::elicit {

// Parsed sentiment score: a valid 1–5 integer, or no response (with the raw
// model text kept for auditing).
class ScoreOutcome {
public:
    static ScoreOutcome valid(int score);
    static ScoreOutcome valid(int score, std::string raw);
    static ScoreOutcome no_response(std::string raw);

    bool is_valid() const { return score_.has_value(); }
    int score() const { return score_.value(); }
    const std::optional<int>& maybe_score() const { return score_; }
    const std::string& raw() const { return raw_; }

    friend bool operator==(const ScoreOutcome& a, const ScoreOutcome& b) { return a.score_ == b.score_; }

private:
    std::optional<int> score_;
    std::string raw_;
};

struct ParseOptions {
    // Keep scanning after an out-of-range first integer instead of treating
    // it as the answer.
    bool scan_past_invalid = false;
};

// Integer tokens are maximal runs of ASCII digits. The first token is the
// answer: 1–5 gives a valid score, anything else (or no token) is no
// response. "3.5" yields 3; "2023" is one token and therefore invalid.
ScoreOutcome parse_score(std::string_view raw, const ParseOptions& options = {});

// s_b − s_u, or nothing when either side is no response.
std::optional<int> compute_bias(const ScoreOutcome& unnamed, const ScoreOutcome& named);

}  // namespace lmbias::elicit
