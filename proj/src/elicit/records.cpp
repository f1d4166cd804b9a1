#include "lmbias/elicit/records.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "lmbias/error.hpp"

namespace lmbias::elicit {
namespace {

using nlohmann::json;

json score_json(const ScoreOutcome& s) { return s.is_valid() ? json(s.score()) : json(nullptr); }

ScoreOutcome score_from_json(const json& j, const char* key, std::size_t line_no) {
    if (j.is_null()) return ScoreOutcome::no_response("");
    if (!j.is_number_integer()) throw ParseError(fmt::format("line {}: '{}' must be an integer or null", line_no, key));
    const int v = j.get<int>();
    if (v < 1 || v > 5) throw ValidationError(fmt::format("line {}: '{}' = {} outside 1..5", line_no, key, v));
    return ScoreOutcome::valid(v);
}

}  // namespace

BiasRecord BiasRecord::make(std::string company_id, std::string fiscal_period, std::string model_id,
                            ScoreOutcome s_u, ScoreOutcome s_b) {
    BiasRecord r{std::move(company_id), std::move(fiscal_period), std::move(model_id), std::move(s_u), std::move(s_b),
                 std::nullopt};
    r.beta = compute_bias(r.s_u, r.s_b);
    return r;
}

void sort_records(std::vector<BiasRecord>& records) {
    std::sort(records.begin(), records.end(), [](const BiasRecord& a, const BiasRecord& b) {
        return std::tie(a.company_id, a.fiscal_period, a.model_id) < std::tie(b.company_id, b.fiscal_period, b.model_id);
    });
}

std::string to_json_line(const BiasRecord& r) {
    json j = json::object();
    j["company_id"] = r.company_id;
    j["fiscal_period"] = r.fiscal_period;
    j["model_id"] = r.model_id;
    j["s_u"] = score_json(r.s_u);
    j["s_b"] = score_json(r.s_b);
    j["beta"] = r.beta ? json(*r.beta) : json(nullptr);
    return j.dump();
}

std::vector<BiasRecord> parse_bias_jsonl(std::istream& in) {
    std::vector<BiasRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("line {}: malformed JSON: {}", line_no, e.what()));
        }
        try {
            auto rec = BiasRecord::make(j.at("company_id").get<std::string>(), j.at("fiscal_period").get<std::string>(),
                                        j.at("model_id").get<std::string>(), score_from_json(j.at("s_u"), "s_u", line_no),
                                        score_from_json(j.at("s_b"), "s_b", line_no));
            const auto& beta = j.at("beta");
            const std::optional<int> stored = beta.is_null() ? std::nullopt : std::optional<int>(beta.get<int>());
            if (stored != rec.beta) {
                throw ValidationError(fmt::format("line {}: beta inconsistent with s_b - s_u", line_no));
            }
            out.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return out;
}

std::vector<BiasRecord> load_bias(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return parse_bias_jsonl(in);
}

void write_bias(std::ostream& out, const std::vector<BiasRecord>& records) {
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace lmbias::elicit
