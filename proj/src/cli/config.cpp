#include "lmbias/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lmbias/corpus/dates.hpp"
#include "lmbias/error.hpp"

namespace lmbias::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(root, {"cache_root", "templates", "cutoff", "backends", "analysis"}, "config");

    try {
        const auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        };
        if (root.contains("cache_root")) cfg.cache_root = resolve(root["cache_root"].get<std::string>());
        if (root.contains("templates")) cfg.templates = resolve(root["templates"].get<std::string>());
        if (root.contains("cutoff")) {
            try {
                cfg.cutoff = parse_clock_time(root["cutoff"].get<std::string>());
            } catch (const ParseError& e) {
                throw ConfigError(fmt::format("config.cutoff: {}", e.what()));
            }
        }
        if (root.contains("backends")) {
            for (const auto& [name, b] : root["backends"].items()) {
                const auto where = fmt::format("config.backends.{}", name);
                if (name == "mock") throw ConfigError(fmt::format("{}: 'mock' is built in", where));
                reject_unknown(b, {"endpoint", "api_key_env", "rate_limit_per_sec", "retries", "max_in_flight", "timeout_s"},
                               where);
                BackendSpec spec;
                spec.name = name;
                spec.endpoint = b.at("endpoint").get<std::string>();
                spec.api_key_env = b.value("api_key_env", std::string{});
                spec.rate_limit_per_sec = b.value("rate_limit_per_sec", 0.0);
                spec.retries = b.value("retries", 3);
                spec.max_in_flight = b.value("max_in_flight", std::size_t{4});
                spec.timeout_s = b.value("timeout_s", 60);
                cfg.backends[name] = std::move(spec);
            }
        }
        if (root.contains("analysis")) {
            const auto& a = root["analysis"];
            reject_unknown(a, {"horizons", "min_obs", "scan_past_invalid", "bold_threshold", "significance", "exclude_overlapping"},
                           "config.analysis");
            if (a.contains("horizons")) cfg.analysis.horizons = a["horizons"].get<std::vector<int>>();
            cfg.analysis.min_obs = a.value("min_obs", cfg.analysis.min_obs);
            cfg.analysis.scan_past_invalid = a.value("scan_past_invalid", false);
            cfg.analysis.bold_threshold = a.value("bold_threshold", cfg.analysis.bold_threshold);
            cfg.analysis.exclude_overlapping = a.value("exclude_overlapping", false);
            const auto sig = a.value("significance", std::string("t"));
            if (sig == "t") {
                cfg.analysis.significance = eventstudy::TestMethod::StudentT;
            } else if (sig == "sign") {
                cfg.analysis.significance = eventstudy::TestMethod::Sign;
            } else {
                throw ConfigError(fmt::format("config.analysis.significance: unknown test '{}'", sig));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path.parent_path());
}

void RunConfig::validate() const {
    for (const auto& [name, b] : backends) {
        if (b.endpoint.empty()) throw ConfigError(fmt::format("backend '{}': empty endpoint", name));
        if (b.retries < 1) throw ConfigError(fmt::format("backend '{}': retries must be >= 1", name));
        if (b.max_in_flight < 1) throw ConfigError(fmt::format("backend '{}': max_in_flight must be >= 1", name));
    }
    if (analysis.horizons.empty()) throw ConfigError("analysis.horizons must not be empty");
    if (!std::is_sorted(analysis.horizons.begin(), analysis.horizons.end()) ||
        std::adjacent_find(analysis.horizons.begin(), analysis.horizons.end()) != analysis.horizons.end()) {
        throw ConfigError("analysis.horizons must be strictly ascending");
    }
    if (analysis.horizons.front() < 0) throw ConfigError("analysis.horizons must be >= 0");
    if (analysis.min_obs < 7) throw ConfigError("analysis.min_obs must be at least 7 (six regressors)");
}

}  // namespace lmbias::cli
