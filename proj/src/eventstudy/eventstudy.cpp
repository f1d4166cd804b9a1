#include "lmbias/eventstudy/eventstudy.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "lmbias/simd/kernels.hpp"

namespace lmbias::eventstudy {

FF5Fit fit_ff5(const std::string& company_id, const std::string& event_id, const ReturnStore& returns,
               const FactorSeries& factors, const TradingCalendar& calendar, std::size_t day0,
               const EventWindow& window) {
    FF5Fit fit;
    fit.company_id = company_id;
    fit.event_id = event_id;
    fit.window_start = window.estimation_start;
    fit.window_end = window.estimation_end;

    std::vector<double> excess;
    for (long rel = window.estimation_start; rel <= window.estimation_end; ++rel) {
        const auto idx = calendar.shift(day0, rel);
        if (!idx) continue;
        const auto& date = calendar[*idx];
        const auto r = returns.on(company_id, date);
        const auto* f = factors.on(date);
        if (!r || f == nullptr) continue;
        excess.push_back(*r - f->rf);
        fit.regressors.push_back({1.0, f->mkt_rf, f->smb, f->hml, f->rmw, f->cma});
    }
    fit.n_obs = excess.size();
    if (fit.n_obs < window.min_obs) {
        throw InsufficientObservations(
            fmt::format("{}: {} estimation observations, need {}", event_id, fit.n_obs, window.min_obs));
    }

    DesignMatrix x(fit.n_obs, 6);
    for (std::size_t i = 0; i < fit.n_obs; ++i) {
        for (std::size_t j = 0; j < 6; ++j) x(i, j) = fit.regressors[i][j];
    }
    auto ols = least_squares(x, excess);
    fit.alpha = ols.coefficients[0];
    std::copy(ols.coefficients.begin() + 1, ols.coefficients.end(), fit.betas.begin());
    fit.residual_variance = ols.residual_variance;
    fit.residuals = std::move(ols.residuals);
    return fit;
}

double expected_return(const FF5Fit& fit, const FactorRecord& f) {
    return f.rf + fit.alpha + fit.betas[0] * f.mkt_rf + fit.betas[1] * f.smb + fit.betas[2] * f.hml +
           fit.betas[3] * f.rmw + fit.betas[4] * f.cma;
}

std::size_t ARSeries::complete_prefix() const {
    std::size_t k = 0;
    while (k < ar.size() && ar[k].has_value()) ++k;
    return k;
}

ARSeries abnormal_returns(const FF5Fit& fit, const ReturnStore& returns, const FactorSeries& factors,
                          const TradingCalendar& calendar, std::size_t day0, const EventWindow& window) {
    ARSeries s;
    s.event_id = fit.event_id;
    s.ar.assign(static_cast<std::size_t>(window.max_day) + 1, std::nullopt);
    for (int day = 0; day <= window.max_day; ++day) {
        const auto idx = calendar.shift(day0, day);
        std::optional<double> r;
        const FactorRecord* f = nullptr;
        if (idx) {
            r = returns.on(fit.company_id, calendar[*idx]);
            f = factors.on(calendar[*idx]);
        }
        if (!r || f == nullptr) {
            s.missing_days.push_back(day);
            continue;
        }
        s.ar[static_cast<std::size_t>(day)] = *r - expected_return(fit, *f);
    }
    return s;
}

std::string_view car_group_name(CarGroup g) {
    switch (g) {
        case CarGroup::Positive: return "positive";
        case CarGroup::Neutral: return "neutral";
        case CarGroup::Negative: return "negative";
        case CarGroup::Spread: return "spread";
    }
    return "?";
}

std::vector<double> EventStudyResult::event_cars_at(int day) const {
    std::vector<double> out;
    for (const auto& path : event_car) {
        if (day >= 0 && static_cast<std::size_t>(day) < path.size()) out.push_back(path[static_cast<std::size_t>(day)]);
    }
    return out;
}

namespace {

std::optional<TestResult> run_test(std::span<const double> sample, TestMethod method) {
    return method == TestMethod::Sign ? sign_test(sample) : one_sample_t(sample);
}

EventStudyResult aggregate(const std::string& model_id, CarGroup group, std::vector<const EventAR*> events,
                           const CarOptions& options) {
    std::sort(events.begin(), events.end(),
              [](const EventAR* a, const EventAR* b) { return a->series.event_id < b->series.event_id; });
    EventStudyResult res;
    res.model_id = model_id;
    res.group = group;
    res.n_events = events.size();
    const auto days = static_cast<std::size_t>(options.max_day) + 1;

    for (const auto* e : events) {
        res.event_ids.push_back(e->series.event_id);
        const auto len = std::min(days, e->series.complete_prefix());
        std::vector<double> path(len);
        double acc = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            acc += *e->series.ar[t];
            path[t] = acc;
        }
        res.event_car.push_back(std::move(path));
    }

    std::vector<double> column;
    for (std::size_t t = 0; t < days; ++t) {
        column.clear();
        for (const auto& path : res.event_car) {
            if (t < path.size()) column.push_back(path[t]);
        }
        if (column.empty()) break;
        res.car_path.push_back(simd::sum(column) / static_cast<double>(column.size()));
        res.n_path.push_back(column.size());
    }

    for (const int h : options.horizons) {
        HorizonSnapshot snap;
        snap.horizon = h;
        if (h >= 0 && static_cast<std::size_t>(h) < res.car_path.size()) {
            snap.car = res.car_path[static_cast<std::size_t>(h)];
            snap.n = res.n_path[static_cast<std::size_t>(h)];
            const auto sample = res.event_cars_at(h);
            snap.test = run_test(sample, options.method);
        }
        res.snapshots.push_back(std::move(snap));
    }
    return res;
}

EventStudyResult spread_of(const EventStudyResult& pos, const EventStudyResult& neg, const CarOptions& options) {
    EventStudyResult res;
    res.model_id = pos.model_id;
    res.group = CarGroup::Spread;
    res.n_events = pos.n_events + neg.n_events;
    const auto len = std::min(pos.car_path.size(), neg.car_path.size());
    for (std::size_t t = 0; t < len; ++t) {
        res.car_path.push_back(pos.car_path[t] - neg.car_path[t]);
        res.n_path.push_back(pos.n_path[t] + neg.n_path[t]);
    }
    for (const int h : options.horizons) {
        HorizonSnapshot snap;
        snap.horizon = h;
        if (h >= 0 && static_cast<std::size_t>(h) < len) {
            snap.car = res.car_path[static_cast<std::size_t>(h)];
            snap.n = res.n_path[static_cast<std::size_t>(h)];
            const auto a = pos.event_cars_at(h);
            const auto b = neg.event_cars_at(h);
            snap.test = welch_t(a, b);
        }
        res.snapshots.push_back(std::move(snap));
    }
    return res;
}

}  // namespace

std::vector<EventStudyResult> group_car(const std::string& model_id, std::span<const EventAR> events,
                                        const CarOptions& options) {
    std::array<std::vector<const EventAR*>, 3> by_group;
    for (const auto& e : events) by_group[static_cast<std::size_t>(e.group)].push_back(&e);

    std::vector<EventStudyResult> out;
    std::optional<std::size_t> pos_idx;
    std::optional<std::size_t> neg_idx;
    constexpr std::array<CarGroup, 3> kCarGroups = {CarGroup::Positive, CarGroup::Neutral, CarGroup::Negative};
    for (std::size_t g = 0; g < 3; ++g) {
        if (by_group[g].empty()) continue;
        if (g == 0) pos_idx = out.size();
        if (g == 2) neg_idx = out.size();
        out.push_back(aggregate(model_id, kCarGroups[g], by_group[g], options));
    }
    if (pos_idx && neg_idx) {
        auto spread = spread_of(out[*pos_idx], out[*neg_idx], options);
        out.push_back(std::move(spread));
    }
    return out;
}

EventStudyRun run_event_study(std::span<const elicit::BiasRecord> records, std::span<const PerformanceDoc> docs,
                              const ReturnStore& returns, const FactorSeries& factors, const TradingCalendar& calendar,
                              const EventStudyConfig& config) {
    std::map<std::pair<std::string, std::string>, const PerformanceDoc*> doc_index;
    std::map<std::string, std::vector<std::size_t>> day0_by_company;
    for (const auto& d : docs) {
        doc_index[{d.company_id, d.fiscal_period}] = &d;
        try {
            day0_by_company[d.company_id].push_back(event_day_zero(d.announcement_at, calendar, config.day_zero));
        } catch (const ValidationError&) {
            // Announcements outside the calendar can't overlap a covered window.
        }
    }

    EventStudyRun run;
    std::vector<EventAR> events;
    std::string model_id;
    for (const auto& r : records) {
        if (model_id.empty()) model_id = r.model_id;
        if (r.model_id != model_id) {
            throw ValidationError(fmt::format("event study over mixed models '{}' and '{}'", model_id, r.model_id));
        }
        const auto event_id = r.event_id();
        if (!r.beta) {
            run.skipped.push_back({event_id, "no valid bias (no response)"});
            continue;
        }
        const auto it = doc_index.find({r.company_id, r.fiscal_period});
        if (it == doc_index.end()) {
            run.skipped.push_back({event_id, "no matching document"});
            continue;
        }
        try {
            const auto day0 = event_day_zero(it->second->announcement_at, calendar, config.day_zero);
            if (config.exclude_overlapping) {
                const long lo = static_cast<long>(day0) + config.window.estimation_start;
                const long hi = static_cast<long>(day0) + config.window.estimation_end;
                bool overlaps = false;
                for (const auto other : day0_by_company[r.company_id]) {
                    const auto o = static_cast<long>(other);
                    overlaps = overlaps || (o >= lo && o <= hi);
                }
                if (overlaps) {
                    run.skipped.push_back({event_id, "estimation window overlaps an earlier announcement"});
                    continue;
                }
            }
            const auto fit = fit_ff5(r.company_id, event_id, returns, factors, calendar, day0, config.window);
            auto series = abnormal_returns(fit, returns, factors, calendar, day0, config.window);
            if (series.empty()) {
                run.skipped.push_back({event_id, "no abnormal returns from day 0"});
                continue;
            }
            events.push_back({std::move(series), analytics::classify(*r.beta)});
        } catch (const ValidationError& e) {
            run.skipped.push_back({event_id, e.what()});
        }
    }
    run.events_used = events.size();
    run.results = group_car(model_id, events, config.car);
    return run;
}

}  // namespace lmbias::eventstudy
