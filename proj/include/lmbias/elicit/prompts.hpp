#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "lmbias/corpus/types.hpp"

namespace lmbias::elicit {

inline constexpr std::string_view kTextPlaceholder = "{text}";
inline constexpr std::string_view kCompanyPlaceholder = "{company_name}";

// A pair of prompt templates. `unnamed` must contain {text} exactly once and
// no {company_name}; `named` must contain each placeholder exactly once.
struct TemplateSet {
    std::string name;
    std::string unnamed;
    std::string named;

    // The English analyst prompts used for the company-name ablation.
    static TemplateSet standard();
    // JSON object {"name": ..., "unnamed": ..., "named": ...}.
    static TemplateSet load(const std::filesystem::path& path);

    void validate() const;  // throws ConfigError
};

struct PromptPair {
    std::string unnamed;
    std::string named;
    // The performance text itself contains the company name, so the unnamed
    // prompt is not anonymous. Such docs are kept and flagged.
    bool unnamed_mentions_company = false;

    friend bool operator==(const PromptPair&, const PromptPair&) = default;
};

// Throws ValidationError for an empty company name, ConfigError for a bad
// template.
PromptPair build_prompts(const PerformanceDoc& doc, const TemplateSet& templates);

// Inverse of substitution: recovers placeholder values if `prompt` was
// rendered from `tmpl`.
std::optional<std::map<std::string, std::string>> match_template(std::string_view tmpl, std::string_view prompt);

}  // namespace lmbias::elicit
