#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmbias/analytics/analytics.hpp"
#include "lmbias/corpus/calendar.hpp"
#include "lmbias/corpus/io.hpp"
#include "lmbias/elicit/records.hpp"
#include "lmbias/eventstudy/ols.hpp"
#include "lmbias/eventstudy/stats.hpp"

namespace lmbias::eventstudy {

// Relative trading-day windows around event day 0. Day 0 is part of every
// horizon, so horizon h covers days 0..h (h + 1 days).
struct EventWindow {
    long estimation_start = -130;
    long estimation_end = -11;
    int max_day = 60;
    std::size_t min_obs = 60;
};

struct FF5Fit {
    std::string company_id;
    std::string event_id;
    double alpha = 0.0;
    // Loadings on mkt_rf, smb, hml, rmw, cma.
    std::array<double, 5> betas{};
    long window_start = 0;
    long window_end = 0;
    std::size_t n_obs = 0;
    double residual_variance = 0.0;
    std::vector<double> residuals;
    std::vector<std::array<double, 6>> regressors;  // [1, mkt_rf, smb, hml, rmw, cma] per used row
};

class InsufficientObservations : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// OLS of (r - rf) on [1, mkt_rf, smb, hml, rmw, cma] over the estimation
// window. Days missing either a return or a factor row are skipped. Throws
// InsufficientObservations below window.min_obs, RankDeficientError for a
// singular design.
FF5Fit fit_ff5(const std::string& company_id, const std::string& event_id, const ReturnStore& returns,
               const FactorSeries& factors, const TradingCalendar& calendar, std::size_t day0,
               const EventWindow& window = {});

// r̂ = rf + alpha + betas · factors
double expected_return(const FF5Fit& fit, const FactorRecord& f);

struct ARSeries {
    std::string event_id;
    std::vector<std::optional<double>> ar;  // relative days 0..max_day
    std::vector<int> missing_days;

    // Days 0..k-1 all present.
    std::size_t complete_prefix() const;
    bool empty() const { return complete_prefix() == 0; }
};

ARSeries abnormal_returns(const FF5Fit& fit, const ReturnStore& returns, const FactorSeries& factors,
                          const TradingCalendar& calendar, std::size_t day0, const EventWindow& window = {});

enum class CarGroup { Positive, Neutral, Negative, Spread };
std::string_view car_group_name(CarGroup g);

struct EventAR {
    ARSeries series;
    analytics::BiasGroup group;
};

struct HorizonSnapshot {
    int horizon = 0;
    std::optional<double> car;
    std::size_t n = 0;
    std::optional<TestResult> test;
};

struct EventStudyResult {
    std::string model_id;
    CarGroup group = CarGroup::Positive;
    // Mean CAR per relative day; truncated at the first day no event covers.
    std::vector<double> car_path;
    std::vector<std::size_t> n_path;
    std::vector<HorizonSnapshot> snapshots;
    std::size_t n_events = 0;
    std::vector<std::string> event_ids;
    // Cumulative AR per event over its complete prefix.
    std::vector<std::vector<double>> event_car;

    std::vector<double> event_cars_at(int day) const;
};

struct CarOptions {
    std::vector<int> horizons{1, 10, 30, 60};
    int max_day = 60;
    // Spread snapshots always use Welch's test.
    TestMethod method = TestMethod::StudentT;
};

// Equal-weighted mean CAR per group plus the positive-minus-negative spread.
// An event contributes to day t only while its ARs are present for every day
// 0..t. Groups without events are omitted; the spread needs both sides.
std::vector<EventStudyResult> group_car(const std::string& model_id, std::span<const EventAR> events,
                                        const CarOptions& options = {});

struct EventStudyConfig {
    EventWindow window;
    CarOptions car;
    DayZeroRule day_zero;
    // Drop events whose estimation window contains an earlier announcement
    // by the same company.
    bool exclude_overlapping = false;
};

struct SkippedEvent {
    std::string event_id;
    std::string reason;
};

struct EventStudyRun {
    std::vector<EventStudyResult> results;
    std::vector<SkippedEvent> skipped;
    std::size_t events_used = 0;
};

// Full pipeline for one model: join records to docs, anchor day 0, fit,
// compute ARs, aggregate per group.
EventStudyRun run_event_study(std::span<const elicit::BiasRecord> records, std::span<const PerformanceDoc> docs,
                              const ReturnStore& returns, const FactorSeries& factors, const TradingCalendar& calendar,
                              const EventStudyConfig& config = {});

}  // namespace lmbias::eventstudy
