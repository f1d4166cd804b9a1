#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmbias/eventstudy/stats.hpp"

namespace lmbias::cli {

struct BackendSpec {
    std::string name;
    std::string endpoint;
    std::string api_key_env;  // name of the variable, never the key itself
    double rate_limit_per_sec = 0.0;  // 0 = unlimited
    int retries = 3;
    std::size_t max_in_flight = 4;
    int timeout_s = 60;
};

struct AnalysisFlags {
    std::vector<int> horizons{1, 10, 30, 60};
    std::size_t min_obs = 60;
    bool scan_past_invalid = false;
    double bold_threshold = 0.2;
    eventstudy::TestMethod significance = eventstudy::TestMethod::StudentT;
    bool exclude_overlapping = false;
};

// JSON config file:
// {
//   "cache_root": ".lmbias-cache",
//   "templates": "templates/ja.json",          (optional)
//   "cutoff": "15:00",
//   "backends": {
//     "openai": {"endpoint": "https://api.openai.com/v1/chat/completions",
//                "api_key_env": "OPENAI_API_KEY", "rate_limit_per_sec": 2,
//                "retries": 3, "max_in_flight": 4, "timeout_s": 60}
//   },
//   "analysis": {"horizons": [1, 10, 30, 60], "min_obs": 60,
//                "scan_past_invalid": false, "bold_threshold": 0.2,
//                "significance": "t" | "sign", "exclude_overlapping": false}
// }
struct RunConfig {
    std::map<std::string, BackendSpec> backends;
    std::filesystem::path cache_root = ".lmbias-cache";
    std::optional<std::filesystem::path> templates;
    std::chrono::minutes cutoff{15 * 60};
    AnalysisFlags analysis;

    static RunConfig load(const std::filesystem::path& path);  // throws ConfigError
    static RunConfig from_json_text(const std::string& text, const std::filesystem::path& base_dir = {});
    void validate() const;
};

}  // namespace lmbias::cli
