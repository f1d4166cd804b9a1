#include "lmbias/analytics/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lmbias/corpus/io.hpp"

namespace lmbias::analytics {
namespace {

constexpr std::array<std::string_view, 9> kBiasLabels = {"+4", "+3", "+2", "+1", "0", "-1", "-2", "-3", "-4"};

std::string count_text(std::size_t c) { return c == 0 ? std::string{} : std::to_string(c); }

std::size_t widest_count(std::span<const BiasDistribution> dists) {
    std::size_t w = 2;
    for (const auto& d : dists) {
        for (const auto c : d.counts) w = std::max(w, count_text(c).size());
    }
    return w;
}

std::string fixed(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

}  // namespace

std::string distribution_cells(const BiasDistribution& d, std::size_t width) {
    std::string row;
    for (int beta = kMaxBias; beta >= kMinBias; --beta) {
        if (beta != kMaxBias) row += ',';
        row += fmt::format("{:>{}}", count_text(d.count(beta)), width);
    }
    return row;
}

std::string render_distribution_text(std::span<const BiasDistribution> dists) {
    const auto width = widest_count(dists);
    std::size_t name_w = 5;
    for (const auto& d : dists) name_w = std::max(name_w, d.model_id.size());

    std::string out = fmt::format("{:<{}}", "model", name_w);
    for (const auto label : kBiasLabels) out += fmt::format(",{:>{}}", label, width);
    out += '\n';
    for (const auto& d : dists) {
        out += fmt::format("{:<{}},{}\n", d.model_id, name_w, distribution_cells(d, width));
    }
    return out;
}

std::string render_distribution_latex(std::span<const BiasDistribution> dists) {
    std::string out = "Model Name& +4 & +3 & +2 & +1 & $\\pm 0$ & -1 & -2 & -3 & -4\\\\ \\hline \\hline\n";
    for (const auto& d : dists) {
        out += d.model_id;
        for (int beta = kMaxBias; beta >= kMinBias; --beta) {
            const auto c = count_text(d.count(beta));
            out += beta == kMaxBias ? "& " : " & ";
            out += c;
        }
        out += "\\\\\n";
    }
    return out;
}

std::string distribution_csv(std::span<const BiasDistribution> dists) {
    std::string out = "model_id";
    for (const auto label : kBiasLabels) {
        out += ',';
        out += label;
    }
    out += ",excluded\n";
    for (const auto& d : dists) {
        out += d.model_id;
        for (int beta = kMaxBias; beta >= kMinBias; --beta) out += fmt::format(",{}", d.count(beta));
        out += fmt::format(",{}\n", d.excluded);
    }
    return out;
}

std::string render_exposure_table(const ExposureSummary& s, const ExposureDisplay& display) {
    std::string out = fmt::format("Exposures by bias group ({})  n: positive={} neutral={} negative={}\n", s.model_id,
                                  s.group(BiasGroup::Positive).n, s.group(BiasGroup::Neutral).n,
                                  s.group(BiasGroup::Negative).n);
    out += fmt::format("{:<20}{:>10}{:>10}{:>10}{:>12}\n", "", "Positive", "Neutral", "Negative", "Spread");
    const auto cell = [](const std::optional<FactorValues>& m, std::size_t k) {
        return m ? fixed((*m)[k], 2) : std::string("n/a");
    };
    for (std::size_t k = 0; k < kFactorCount; ++k) {
        std::string spread = "n/a";
        if (s.spread) {
            spread = fixed((*s.spread)[k], 2);
            if (std::fabs((*s.spread)[k]) >= display.bold_threshold) spread = "**" + spread + "**";
        }
        out += fmt::format("{:<20}{:>10}{:>10}{:>10}{:>12}\n", kFactorNames[k], cell(s.group(BiasGroup::Positive).mean, k),
                           cell(s.group(BiasGroup::Neutral).mean, k), cell(s.group(BiasGroup::Negative).mean, k), spread);
    }
    return out;
}

std::string render_spread_table(std::span<const ExposureSummary> summaries) {
    std::size_t col_w = 9;
    for (const auto& s : summaries) col_w = std::max(col_w, s.model_id.size() + 1);
    std::string out = fmt::format("{:<20}", "");
    for (const auto& s : summaries) out += fmt::format("{:>{}}", s.model_id, col_w);
    out += fmt::format("{:>{}}\n", "Average", col_w);
    for (std::size_t k = 0; k < kFactorCount; ++k) {
        out += fmt::format("{:<20}", kFactorNames[k]);
        double total = 0.0;
        std::size_t n = 0;
        for (const auto& s : summaries) {
            if (s.spread) {
                out += fmt::format("{:>{}}", fixed((*s.spread)[k], 3), col_w);
                total += (*s.spread)[k];
                ++n;
            } else {
                out += fmt::format("{:>{}}", "n/a", col_w);
            }
        }
        out += fmt::format("{:>{}}\n", n > 0 ? fixed(total / static_cast<double>(n), 3) : std::string("n/a"), col_w);
    }
    return out;
}

std::string exposure_csv(std::span<const ExposureSummary> summaries) {
    std::string out = "model_id,factor,positive,neutral,negative,spread,n_positive,n_neutral,n_negative\n";
    const auto num = [](const std::optional<FactorValues>& m, std::size_t k) {
        return m ? format_double((*m)[k]) : std::string{};
    };
    for (const auto& s : summaries) {
        for (std::size_t k = 0; k < kFactorCount; ++k) {
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.model_id, kFactorNames[k],
                               num(s.group(BiasGroup::Positive).mean, k), num(s.group(BiasGroup::Neutral).mean, k),
                               num(s.group(BiasGroup::Negative).mean, k), num(s.spread, k), s.group(BiasGroup::Positive).n,
                               s.group(BiasGroup::Neutral).n, s.group(BiasGroup::Negative).n);
        }
    }
    return out;
}

}  // namespace lmbias::analytics
