#include "lmbias/market/model.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "lmbias/simd/kernels.hpp"

namespace lmbias::market {

void MarketParams::validate() const {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError(fmt::format("mu must be in [0, 1], got {}", mu));
    if (!(gamma > 0.0)) throw ValidationError(fmt::format("gamma must be > 0, got {}", gamma));
    if (!(r > 0.0)) throw ValidationError(fmt::format("r must be > 0, got {}", r));
    if (!(theta > 0.0 && theta < 1.0)) throw ValidationError(fmt::format("theta must be in (0, 1), got {}", theta));
    if (!(sigma2_eta >= 0.0)) throw ValidationError(fmt::format("sigma2_eta must be >= 0, got {}", sigma2_eta));
    if (!std::isfinite(beta_hat)) throw ValidationError("beta_hat must be finite");
}

double certainty_equivalent(double mean_wealth, double var_wealth, double gamma) {
    return mean_wealth - gamma * var_wealth;
}

double holding_unbiased(double r, double expected_next_price, double price, double gamma, double expected_next_var) {
    if (!(expected_next_var > 0.0)) throw ValidationError("holding undefined for non-positive price variance");
    return (r + expected_next_price - price * (1.0 + r)) / (2.0 * gamma * expected_next_var);
}

double holding_biased(double r, double expected_next_price, double price, double gamma, double expected_next_var,
                      double beta_t) {
    return holding_unbiased(r, expected_next_price, price, gamma, expected_next_var) +
           beta_t / (2.0 * gamma * expected_next_var);
}

double clearing_price(const MarketParams& p, double expected_next_price, double expected_next_var, double beta_t) {
    return (p.r + expected_next_price - 2.0 * p.gamma * expected_next_var + p.mu * beta_t) / (1.0 + p.r);
}

double aggregate_demand(const MarketParams& p, double expected_next_price, double expected_next_var, double beta_t,
                        double price) {
    const double lu = holding_unbiased(p.r, expected_next_price, price, p.gamma, expected_next_var);
    const double lb = holding_biased(p.r, expected_next_price, price, p.gamma, expected_next_var, beta_t);
    return (1.0 - p.mu) * lu + p.mu * lb;
}

DerivedConstants derived_constants(const MarketParams& p) {
    const double gap = 1.0 + p.r - p.theta;
    if (!(gap > 0.0)) throw ValidationError("theta >= 1 + r: bias-variance recursion has no stationary solution");
    const double g = 1.0 + p.r;
    DerivedConstants k;
    k.nu = p.r / gap;
    k.state_loading = 2.0 * p.gamma * p.theta * p.mu * p.mu / (g * g * gap);
    k.c = k.state_loading * k.state_loading * p.sigma2_eta;
    k.constant_loading = 2.0 * p.gamma * k.c / p.r;
    return k;
}

FixedPointResiduals fixed_point_residuals(const MarketParams& p, const DerivedConstants& k) {
    const double g = 1.0 + p.r;
    const double a = k.state_loading;
    const double b = k.constant_loading;
    return {std::fabs(a * g - (a * p.theta + 2.0 * p.gamma * p.theta * p.mu * p.mu / (g * g))),
            std::fabs(b * g - (b + 2.0 * p.gamma * a * a * p.sigma2_eta))};
}

double closed_form_price(const MarketParams& p, const MarketState& s, const DerivedConstants& k) {
    return 1.0 + p.mu * (s.beta_t - p.beta_hat) / (1.0 + p.r) + p.mu * p.beta_hat / p.r -
           k.state_loading * s.sigma2_beta_t - k.constant_loading;
}

double closed_form_price(const MarketParams& p, const MarketState& s) {
    return closed_form_price(p, s, derived_constants(p));
}

ConsistencyReport exact_one_step(const MarketParams& p, const MarketState& s, const DerivedConstants& k,
                                 double tolerance) {
    const double mean_var_next = p.theta * s.sigma2_beta_t;
    const MarketState centre{p.beta_hat, mean_var_next};
    const double base = closed_form_price(p, centre, k);
    const double slope_beta = closed_form_price(p, {p.beta_hat + 1.0, mean_var_next}, k) - base;
    const double slope_var = closed_form_price(p, {p.beta_hat, mean_var_next + 1.0}, k) - base;

    ConsistencyReport rep;
    rep.expected_next_price = base;
    // Var(beta_{t+1}) = E[sigma2_{t+1}] = theta sigma2_t; Var(sigma2_{t+1}) = sigma2_eta;
    // the two are uncorrelated.
    rep.expected_next_var = slope_beta * slope_beta * mean_var_next + slope_var * slope_var * p.sigma2_eta;
    rep.clearing = clearing_price(p, rep.expected_next_price, rep.expected_next_var, s.beta_t);
    rep.closed_form = closed_form_price(p, s, k);
    rep.residual = std::fabs(rep.clearing - rep.closed_form);
    rep.passed = rep.residual < tolerance;
    return rep;
}

ConsistencyReport one_step_consistency(const MarketParams& p, const MarketState& s, const DerivedConstants& k,
                                       std::size_t n_draws, std::uint64_t seed, double z) {
    if (n_draws < 10000) throw ValidationError(fmt::format("need at least 10^4 draws, got {}", n_draws));
    if (p.sigma2_eta == 0.0) return exact_one_step(p, s, k);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd_eta = std::sqrt(p.sigma2_eta);
    const double sd_beta = std::sqrt(p.theta * s.sigma2_beta_t);

    std::vector<double> prices(n_draws);
    std::size_t negative = 0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double var_next = p.theta * s.sigma2_beta_t + sd_eta * normal(rng);
        const double beta_next = p.beta_hat + sd_beta * normal(rng);
        if (var_next < 0.0) ++negative;
        prices[i] = closed_form_price(p, {beta_next, var_next}, k);
    }

    const double n = static_cast<double>(n_draws);
    const double mean = simd::sum(prices) / n;
    const auto cm = simd::central_moments(prices, mean);
    const double m2 = cm.m2 / n;
    const double m3 = cm.m3 / n;
    const double m4 = cm.m4 / n;

    ConsistencyReport rep;
    rep.draws = n_draws;
    rep.negative_variance_fraction = static_cast<double>(negative) / n;
    rep.expected_next_price = mean;
    rep.expected_next_var = cm.m2 / (n - 1.0);
    rep.clearing = clearing_price(p, rep.expected_next_price, rep.expected_next_var, s.beta_t);
    rep.closed_form = closed_form_price(p, s, k);
    rep.residual = std::fabs(rep.clearing - rep.closed_form);

    // clearing = (r + m - 2 gamma v + mu beta) / (1 + r); delta-method variance
    // of m - 2 gamma v from Var(m) = m2/n, Var(v) = (m4 - m2^2)/n, Cov = m3/n.
    const double g2 = 2.0 * p.gamma;
    const double var_lin = (m2 + g2 * g2 * (m4 - m2 * m2) - 2.0 * g2 * m3) / n;
    rep.standard_error = std::sqrt(std::max(var_lin, 0.0)) / (1.0 + p.r);
    rep.passed = rep.residual <= z * rep.standard_error;
    return rep;
}

}  // namespace lmbias::market
