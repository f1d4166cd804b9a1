#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmbias/market/model.hpp"

namespace lmbias::market {

// Simulated paths, row-major by path: entry [path * (horizon + 1) + t] for
// t = 0..horizon, where t = 0 is the initial state.
struct PathEnsemble {
    std::size_t n_paths = 0;
    std::size_t horizon = 0;
    // AR(1) bias variance before clamping.
    std::vector<double> latent_sigma2;
    // max(latent, 0): the variance used to draw beta_t and to price.
    std::vector<double> sigma2;
    std::vector<double> beta;
    std::vector<double> p_star;
    std::size_t clamped = 0;

    std::size_t index(std::size_t path, std::size_t t) const { return path * (horizon + 1) + t; }
    double clamped_fraction() const;
    // Latent variance series of one path.
    std::vector<double> latent_path(std::size_t path) const;
};

// Per-path generators are seeded from (seed, path id), so results do not
// depend on the order paths are produced in.
PathEnsemble simulate_paths(const MarketParams& p, const MarketState& initial, std::size_t horizon,
                            std::size_t n_paths, std::uint64_t seed);

// paths.csv: path_id,t,beta_t,sigma2_beta_t,p_star
void write_paths_csv(std::ostream& out, const PathEnsemble& e);

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace lmbias::market
