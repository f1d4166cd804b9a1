#include "lmbias/market/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "lmbias/corpus/io.hpp"

namespace lmbias::market {

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double PathEnsemble::clamped_fraction() const {
    const auto total = n_paths * horizon;
    return total == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(total);
}

std::vector<double> PathEnsemble::latent_path(std::size_t path) const {
    const auto first = latent_sigma2.begin() + static_cast<std::ptrdiff_t>(index(path, 0));
    return {first, first + static_cast<std::ptrdiff_t>(horizon + 1)};
}

PathEnsemble simulate_paths(const MarketParams& p, const MarketState& initial, std::size_t horizon,
                            std::size_t n_paths, std::uint64_t seed) {
    p.validate();
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (initial.sigma2_beta_t < 0.0) throw ValidationError("initial bias variance must be >= 0");
    const auto k = derived_constants(p);

    PathEnsemble e;
    e.n_paths = n_paths;
    e.horizon = horizon;
    const auto total = n_paths * (horizon + 1);
    e.latent_sigma2.resize(total);
    e.sigma2.resize(total);
    e.beta.resize(total);
    e.p_star.resize(total);

    const double sd_eta = std::sqrt(p.sigma2_eta);
    for (std::size_t path = 0; path < n_paths; ++path) {
        std::mt19937_64 rng(substream_seed(seed, path));
        std::normal_distribution<double> normal(0.0, 1.0);

        double latent = initial.sigma2_beta_t;
        double beta = initial.beta_t;
        for (std::size_t t = 0; t <= horizon; ++t) {
            if (t > 0) {
                latent = p.theta * latent + (sd_eta > 0.0 ? sd_eta * normal(rng) : 0.0);
            }
            const double var = std::max(latent, 0.0);
            if (t > 0) {
                if (latent < 0.0) ++e.clamped;
                beta = p.beta_hat + std::sqrt(var) * normal(rng);
            }
            const auto i = e.index(path, t);
            e.latent_sigma2[i] = latent;
            e.sigma2[i] = var;
            e.beta[i] = beta;
            e.p_star[i] = closed_form_price(p, {beta, var}, k);
        }
    }
    return e;
}

void write_paths_csv(std::ostream& out, const PathEnsemble& e) {
    out << "path_id,t,beta_t,sigma2_beta_t,p_star\n";
    for (std::size_t path = 0; path < e.n_paths; ++path) {
        for (std::size_t t = 0; t <= e.horizon; ++t) {
            const auto i = e.index(path, t);
            out << path << ',' << t << ',' << format_double(e.beta[i]) << ',' << format_double(e.sigma2[i]) << ','
                << format_double(e.p_star[i]) << '\n';
        }
    }
}

}  // namespace lmbias::market
