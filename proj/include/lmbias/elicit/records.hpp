#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmbias/elicit/score.hpp"

namespace lmbias::elicit {

// Paired scores for one document under one model. beta = s_b - s_u and is
// present exactly when both scores are valid.
struct BiasRecord {
    std::string company_id;
    std::string fiscal_period;
    std::string model_id;
    ScoreOutcome s_u;
    ScoreOutcome s_b;
    std::optional<int> beta;

    static BiasRecord make(std::string company_id, std::string fiscal_period, std::string model_id,
                           ScoreOutcome s_u, ScoreOutcome s_b);

    std::string event_id() const { return company_id + ":" + fiscal_period; }
    friend bool operator==(const BiasRecord&, const BiasRecord&) = default;
};

// Canonical output order: (company_id, fiscal_period, model_id).
void sort_records(std::vector<BiasRecord>& records);

// bias.jsonl: {"company_id","fiscal_period","model_id","s_u","s_b","beta"};
// scores are integers or null, beta null when absent.
std::string to_json_line(const BiasRecord& r);
std::vector<BiasRecord> parse_bias_jsonl(std::istream& in);  // throws ParseError/ValidationError
std::vector<BiasRecord> load_bias(const std::filesystem::path& path);
void write_bias(std::ostream& out, const std::vector<BiasRecord>& records);

}  // namespace lmbias::elicit
