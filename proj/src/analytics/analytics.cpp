#include "lmbias/analytics/analytics.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "lmbias/error.hpp"

namespace lmbias::analytics {

std::string_view group_name(BiasGroup g) {
    switch (g) {
        case BiasGroup::Positive: return "positive";
        case BiasGroup::Neutral: return "neutral";
        case BiasGroup::Negative: return "negative";
    }
    return "?";
}

BiasGroup classify(int beta) {
    if (beta > 0) return BiasGroup::Positive;
    if (beta < 0) return BiasGroup::Negative;
    return BiasGroup::Neutral;
}

std::size_t BiasDistribution::count(int beta) const {
    if (beta < kMinBias || beta > kMaxBias) return 0;
    return counts[static_cast<std::size_t>(beta - kMinBias)];
}

std::size_t BiasDistribution::valid() const {
    std::size_t n = 0;
    for (const auto c : counts) n += c;
    return n;
}

BiasDistribution distribution(std::span<const elicit::BiasRecord> records) {
    BiasDistribution d;
    if (!records.empty()) d.model_id = records.front().model_id;
    for (const auto& r : records) {
        if (r.model_id != d.model_id) {
            throw ValidationError(fmt::format("distribution over mixed models '{}' and '{}'", d.model_id, r.model_id));
        }
        if (!r.beta) {
            ++d.excluded;
            continue;
        }
        if (*r.beta < kMinBias || *r.beta > kMaxBias) {
            throw ValidationError(fmt::format("beta {} outside [-4, 4] for {}", *r.beta, r.event_id()));
        }
        ++d.counts[static_cast<std::size_t>(*r.beta - kMinBias)];
    }
    return d;
}

std::vector<std::vector<elicit::BiasRecord>> split_by_model(std::span<const elicit::BiasRecord> records) {
    std::map<std::string, std::vector<elicit::BiasRecord>> by_model;
    for (const auto& r : records) by_model[r.model_id].push_back(r);
    std::vector<std::vector<elicit::BiasRecord>> out;
    for (auto& [_, v] : by_model) {
        elicit::sort_records(v);
        out.push_back(std::move(v));
    }
    return out;
}

ExposureSummary exposure_summary(std::span<const elicit::BiasRecord> records, const ExposureLookup& lookup) {
    std::vector<const elicit::BiasRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& r : records) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        return std::tie(a->company_id, a->fiscal_period, a->model_id) < std::tie(b->company_id, b->fiscal_period, b->model_id);
    });

    ExposureSummary s;
    if (!ordered.empty()) s.model_id = ordered.front()->model_id;
    std::array<FactorValues, 3> sums{};
    for (const auto* r : ordered) {
        if (r->model_id != s.model_id) {
            throw ValidationError(fmt::format("exposure summary over mixed models '{}' and '{}'", s.model_id, r->model_id));
        }
        if (!r->beta) {
            ++s.excluded_invalid;
            continue;
        }
        const auto exposure = lookup(*r);
        if (!exposure) {
            ++s.dropped_no_exposure;
            continue;
        }
        const auto g = static_cast<std::size_t>(classify(*r->beta));
        ++s.groups[g].n;
        for (std::size_t k = 0; k < kFactorCount; ++k) sums[g][k] += exposure->values[k];
    }
    for (std::size_t g = 0; g < 3; ++g) {
        if (s.groups[g].n == 0) continue;
        FactorValues mean{};
        for (std::size_t k = 0; k < kFactorCount; ++k) mean[k] = sums[g][k] / static_cast<double>(s.groups[g].n);
        s.groups[g].mean = mean;
    }
    const auto& pos = s.group(BiasGroup::Positive).mean;
    const auto& neg = s.group(BiasGroup::Negative).mean;
    if (pos && neg) {
        FactorValues spread{};
        for (std::size_t k = 0; k < kFactorCount; ++k) spread[k] = (*pos)[k] - (*neg)[k];
        s.spread = spread;
    }
    return s;
}

}  // namespace lmbias::analytics
