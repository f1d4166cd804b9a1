#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "lmbias/corpus/dates.hpp"

namespace lmbias {

// One company's performance narrative from an earnings summary.
struct PerformanceDoc {
    std::string company_id;
    std::string company_name;
    Timestamp announcement_at;
    std::string fiscal_period;
    std::string text;

    friend bool operator==(const PerformanceDoc&, const PerformanceDoc&) = default;
};

inline constexpr std::size_t kFactorCount = 20;

// Style factor names in the column order of exposures.csv.
inline constexpr std::array<std::string_view, kFactorCount> kFactorNames = {
    "Short Term Reversal", "Beta",           "NK225",
    "Size",                "Residual Volatility", "Liquidity",
    "Momentum",            "Non-Linear Size", "Leverage",
    "Value",               "Macro Sensitivity", "Long Term Reversal",
    "Foreign Sensitivity", "Sentiment",      "Earnings Yield",
    "Management",          "Industry Momentum", "Growth",
    "Earnings Quality",    "Prospect"};

std::optional<std::size_t> factor_index(std::string_view name);

using FactorValues = std::array<double, kFactorCount>;

struct ExposureVector {
    std::string company_id;
    Date as_of{};
    FactorValues values{};

    double operator[](std::string_view factor) const;
    friend bool operator==(const ExposureVector&, const ExposureVector&) = default;
};

struct ReturnRecord {
    std::string company_id;
    Date date{};
    double ret = 0.0;

    friend bool operator==(const ReturnRecord&, const ReturnRecord&) = default;
};

struct FactorRecord {
    Date date{};
    double mkt_rf = 0.0;
    double smb = 0.0;
    double hml = 0.0;
    double rmw = 0.0;
    double cma = 0.0;
    double rf = 0.0;

    friend bool operator==(const FactorRecord&, const FactorRecord&) = default;
};

}  // namespace lmbias
