#include "lmbias/elicit/prompts.hpp"

#include <fstream>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "lmbias/error.hpp"

namespace lmbias::elicit {
namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

struct Segment {
    bool placeholder;
    std::string_view value;  // literal text, or placeholder name without braces
};

std::vector<Segment> split_template(std::string_view tmpl) {
    std::vector<Segment> out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t next = std::string_view::npos;
        std::string_view which;
        for (const auto ph : {kTextPlaceholder, kCompanyPlaceholder}) {
            const auto at = tmpl.find(ph, pos);
            if (at < next) {
                next = at;
                which = ph;
            }
        }
        if (next == std::string_view::npos) {
            out.push_back({false, tmpl.substr(pos)});
            break;
        }
        if (next > pos) out.push_back({false, tmpl.substr(pos, next - pos)});
        out.push_back({true, which.substr(1, which.size() - 2)});
        pos = next + which.size();
    }
    return out;
}

std::string render(std::string_view tmpl, const PerformanceDoc& doc) {
    std::string out;
    for (const auto& seg : split_template(tmpl)) {
        if (!seg.placeholder) {
            out.append(seg.value);
        } else if (seg.value == "text") {
            out += doc.text;
        } else {
            out += doc.company_name;
        }
    }
    return out;
}

}  // namespace

TemplateSet TemplateSet::standard() {
    TemplateSet t;
    t.name = "standard-en";
    t.unnamed =
        "You are a financial analyst.\n"
        "Below is a sentence describing financial performance.\n"
        "Please rate the sentiment of this sentence on a scale from 1 (bad) to 5 (good).\n"
        "Please output only the sentiment score.\n"
        "{text}";
    t.named =
        "You are a financial analyst.\n"
        "Below is a sentence describing the financial performance of {company_name}.\n"
        "Please rate the sentiment of this sentence on a scale from 1 (bad) to 5 (good).\n"
        "Please output only the sentiment score.\n"
        "{text}";
    return t;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open template file '{}'", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("template file '{}': {}", path.string(), e.what()));
    }
    TemplateSet t;
    try {
        t.name = j.value("name", path.stem().string());
        t.unnamed = j.at("unnamed").get<std::string>();
        t.named = j.at("named").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("template file '{}': {}", path.string(), e.what()));
    }
    t.validate();
    return t;
}

void TemplateSet::validate() const {
    if (count_occurrences(unnamed, kTextPlaceholder) != 1) {
        throw ConfigError(fmt::format("template '{}': unnamed prompt needs exactly one {}", name, kTextPlaceholder));
    }
    if (count_occurrences(unnamed, kCompanyPlaceholder) != 0) {
        throw ConfigError(fmt::format("template '{}': unnamed prompt must not contain {}", name, kCompanyPlaceholder));
    }
    if (count_occurrences(named, kTextPlaceholder) != 1) {
        throw ConfigError(fmt::format("template '{}': named prompt needs exactly one {}", name, kTextPlaceholder));
    }
    if (count_occurrences(named, kCompanyPlaceholder) != 1) {
        throw ConfigError(fmt::format("template '{}': named prompt needs exactly one {}", name, kCompanyPlaceholder));
    }
}

PromptPair build_prompts(const PerformanceDoc& doc, const TemplateSet& templates) {
    templates.validate();
    if (doc.company_name.empty()) {
        throw ValidationError(fmt::format("{} {}: empty company_name for named prompt", doc.company_id, doc.fiscal_period));
    }
    PromptPair pair;
    pair.unnamed = render(templates.unnamed, doc);
    pair.named = render(templates.named, doc);
    pair.unnamed_mentions_company = doc.text.find(doc.company_name) != std::string::npos;
    return pair;
}

std::optional<std::map<std::string, std::string>> match_template(std::string_view tmpl, std::string_view prompt) {
    const auto segments = split_template(tmpl);
    std::map<std::string, std::string> values;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (!seg.placeholder) {
            if (prompt.substr(pos, seg.value.size()) != seg.value) return std::nullopt;
            pos += seg.value.size();
            continue;
        }
        // Placeholder: runs up to the next literal (or the end).
        std::size_t end = prompt.size();
        if (i + 1 < segments.size()) {
            if (segments[i + 1].placeholder) return std::nullopt;
            const auto& lit = segments[i + 1].value;
            if (i + 2 == segments.size()) {
                // Trailing literal must match the suffix.
                if (prompt.size() < pos + lit.size() || prompt.substr(prompt.size() - lit.size()) != lit) return std::nullopt;
                end = prompt.size() - lit.size();
            } else {
                end = prompt.find(lit, pos);
                if (end == std::string_view::npos) return std::nullopt;
            }
        }
        values[std::string(seg.value)] = std::string(prompt.substr(pos, end - pos));
        pos = end;
    }
    if (pos != prompt.size()) return std::nullopt;
    return values;
}

}  // namespace lmbias::elicit
