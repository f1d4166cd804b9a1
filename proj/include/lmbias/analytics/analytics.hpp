#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmbias/corpus/types.hpp"
#include "lmbias/elicit/records.hpp"

namespace lmbias::analytics {

enum class BiasGroup { Positive = 0, Neutral = 1, Negative = 2 };

inline constexpr std::array<BiasGroup, 3> kGroups = {BiasGroup::Positive, BiasGroup::Neutral, BiasGroup::Negative};

std::string_view group_name(BiasGroup g);
BiasGroup classify(int beta);

inline constexpr int kMinBias = -4;
inline constexpr int kMaxBias = 4;

struct BiasDistribution {
    std::string model_id;
    std::array<std::size_t, 9> counts{};  // index = beta + 4
    std::size_t excluded = 0;

    std::size_t count(int beta) const;
    std::size_t valid() const;
};

// Histogram of valid betas; records without beta go to `excluded`. Throws
// ValidationError when records carry more than one model id.
BiasDistribution distribution(std::span<const elicit::BiasRecord> records);

// Records grouped by model id, models in lexicographic order.
std::vector<std::vector<elicit::BiasRecord>> split_by_model(std::span<const elicit::BiasRecord> records);

struct GroupExposure {
    std::size_t n = 0;
    std::optional<FactorValues> mean;  // absent when n == 0
};

struct ExposureSummary {
    std::string model_id;
    std::array<GroupExposure, 3> groups;  // indexed by BiasGroup
    std::optional<FactorValues> spread;   // positive mean - negative mean
    std::size_t dropped_no_exposure = 0;
    std::size_t excluded_invalid = 0;

    const GroupExposure& group(BiasGroup g) const { return groups[static_cast<std::size_t>(g)]; }
};

using ExposureLookup = std::function<std::optional<ExposureVector>(const elicit::BiasRecord&)>;

// Arithmetic mean exposure per bias group and the positive-minus-negative
// spread. Each announcement counts once. Inputs are put in canonical order
// before summation so the result does not depend on input order.
ExposureSummary exposure_summary(std::span<const elicit::BiasRecord> records, const ExposureLookup& lookup);

}  // namespace lmbias::analytics
