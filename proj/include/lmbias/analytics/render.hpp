#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "lmbias/analytics/analytics.hpp"

namespace lmbias::analytics {

// Nine count cells for beta = +4 … -4, right-aligned to `width`, joined by
// ','. Zero counts are blank.
std::string distribution_cells(const BiasDistribution& d, std::size_t width = 2);

// Plain-text frequency table, one row per model.
std::string render_distribution_text(std::span<const BiasDistribution> dists);
// LaTeX tabular rows ("GPT-4o&  &  & 7 & 1328 & ... \\").
std::string render_distribution_latex(std::span<const BiasDistribution> dists);
// distribution.csv: model_id,+4,…,-4,excluded (zeros written as 0).
std::string distribution_csv(std::span<const BiasDistribution> dists);

struct ExposureDisplay {
    // |spread| at or above this is highlighted.
    double bold_threshold = 0.2;
};

// Per-model factor table: positive, neutral, negative, spread (2 decimals).
// Absent values print as "n/a"; large spreads are wrapped in **…**.
std::string render_exposure_table(const ExposureSummary& s, const ExposureDisplay& display = {});
// Factor × model spread table with a cross-model average (3 decimals).
std::string render_spread_table(std::span<const ExposureSummary> summaries);
// exposures.csv: model_id,factor,positive,neutral,negative,spread,n_positive,n_neutral,n_negative
// with full-precision values and empty cells for absent ones.
std::string exposure_csv(std::span<const ExposureSummary> summaries);

}  // namespace lmbias::analytics
