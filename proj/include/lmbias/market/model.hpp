#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "lmbias/error.hpp"

namespace lmbias::market {

// Two investor types trade one risky asset paying a constant dividend r:
// a fraction mu is biased (sentiment beta_t added to the expected payoff),
// the rest unbiased. Both have CARA utility -exp(-2 gamma W). The bias
// variance follows sigma2_{t} = theta * sigma2_{t-1} + eta_t.
struct MarketParams {
    double mu = 0.5;          // fraction of biased investors, [0, 1]
    double gamma = 1.0;       // absolute risk aversion, > 0
    double r = 0.05;          // risk-free rate, > 0
    double theta = 0.5;       // AR coefficient of the bias variance, (0, 1)
    double sigma2_eta = 1e-4; // innovation variance, >= 0
    double beta_hat = 0.02;   // long-run mean bias

    void validate() const;  // throws ValidationError
};

struct MarketState {
    double beta_t = 0.0;
    double sigma2_beta_t = 0.0;  // >= 0
};

// Single-period belief about next price (unbiased investor). Not needed for
// the equilibrium, which endogenizes the price moments.
struct BeliefSpec {
    double p_hat = 1.0;
    double sigma2_p = 0.0;
};

// Stationary solution of the price recursion:
//   p* = 1 + mu (beta_t - beta_hat)/(1+r) + mu beta_hat / r
//          - state_loading * sigma2_beta_t - constant_loading
struct DerivedConstants {
    double nu = 0.0;                // r / (1 + r - theta)
    double state_loading = 0.0;     // 2 gamma theta mu^2 / ((1+r)^2 (1+r-theta))
    double c = 0.0;                 // state_loading^2 * sigma2_eta
    double constant_loading = 0.0;  // 2 gamma c / r
};

// Residuals of the two fixed-point conditions the loadings must satisfy:
//   A(1+r) = A theta + 2 gamma theta mu^2 / (1+r)^2
//   B(1+r) = B + 2 gamma A^2 sigma2_eta
struct FixedPointResiduals {
    double state = 0.0;
    double constant = 0.0;
};

// Mean-variance objective equivalent to CARA expected utility under normal
// payoffs.
double certainty_equivalent(double mean_wealth, double var_wealth, double gamma);

// Optimal risky holdings. Throw ValidationError for non-positive variance.
double holding_unbiased(double r, double expected_next_price, double price, double gamma, double expected_next_var);
double holding_biased(double r, double expected_next_price, double price, double gamma, double expected_next_var,
                      double beta_t);

// Price solving (1 - mu) lambda_u + mu lambda_b = 1.
double clearing_price(const MarketParams& p, double expected_next_price, double expected_next_var, double beta_t);

// Population-weighted holdings at a given price; equals 1 at the clearing
// price.
double aggregate_demand(const MarketParams& p, double expected_next_price, double expected_next_var, double beta_t,
                        double price);

// Throws ValidationError when theta >= 1 + r (no stationary solution).
DerivedConstants derived_constants(const MarketParams& p);
FixedPointResiduals fixed_point_residuals(const MarketParams& p, const DerivedConstants& k);

double closed_form_price(const MarketParams& p, const MarketState& s, const DerivedConstants& k);
double closed_form_price(const MarketParams& p, const MarketState& s);

struct ConsistencyReport {
    double clearing = 0.0;     // clearing price from the estimated next-period moments
    double closed_form = 0.0;  // closed-form price at t
    double residual = 0.0;     // |clearing - closed_form|
    double standard_error = 0.0;
    double expected_next_price = 0.0;
    double expected_next_var = 0.0;
    std::size_t draws = 0;     // 0 for the exact evaluation
    double negative_variance_fraction = 0.0;  // share of sigma2_{t+1} draws below zero
    bool passed = false;
};

// Plugs next-period price moments implied by closed_form_price back into the
// clearing condition. The moments are exact: p*_{t+1} is affine in
// (beta_{t+1}, sigma2_{t+1}), its slopes are read off closed_form_price by
// differencing, and E/Var of the state follow from the process definition.
// Passes when residual < tolerance.
ConsistencyReport exact_one_step(const MarketParams& p, const MarketState& s, const DerivedConstants& k,
                                 double tolerance = 1e-10);

// Monte Carlo version: draws sigma2_{t+1} = theta sigma2_t + eta (unclamped)
// and beta_{t+1} ~ N(beta_hat, theta sigma2_t) independently, evaluates
// closed_form_price at t+1 for each draw and estimates the moments. Passes
// when the residual is within `z` standard errors (delta method on mean and
// variance). With sigma2_eta == 0 the innovation draw is degenerate and the
// exact evaluation is used instead. Requires n_draws >= 10^4.
ConsistencyReport one_step_consistency(const MarketParams& p, const MarketState& s, const DerivedConstants& k,
                                       std::size_t n_draws, std::uint64_t seed, double z = 3.0);

}  // namespace lmbias::market
