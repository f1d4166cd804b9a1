#pragma once

#include <optional>
#include <span>
#include <string>

namespace lmbias::eventstudy {

enum class TestMethod { StudentT, Sign };

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
    std::string stars;  // "**" p < .05, "*" p < .1
};

std::string stars_for(double p_value);

// Two-sided one-sample t-test of mean == 0. Zero sample variance gives
// t = ±inf, p = 0 for a nonzero mean and t = 0, p = 1 for a zero mean.
// Absent for n < 2.
std::optional<TestResult> one_sample_t(std::span<const double> sample);

// Two-sided Welch test of mean(a) == mean(b). Absent if either n < 2.
std::optional<TestResult> welch_t(std::span<const double> a, std::span<const double> b);

// Two-sided exact sign test (zeros dropped); statistic is the count of
// positives. Absent when fewer than 2 nonzero values.
std::optional<TestResult> sign_test(std::span<const double> sample);

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

SampleMoments sample_moments(std::span<const double> x);

// Lag-1 sample autocorrelation (mean-centered, biased denominators).
double lag1_autocorrelation(std::span<const double> x);

}  // namespace lmbias::eventstudy
