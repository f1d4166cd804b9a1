#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lmbias/error.hpp"
#include "lmbias/eventstudy/eventstudy.hpp"
#include "lmbias/eventstudy/ols.hpp"
#include "lmbias/eventstudy/render.hpp"
#include "lmbias/eventstudy/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lmbias;
using namespace lmbias::eventstudy;
using lmbias::testing::make_market_fixture;
using lmbias::testing::MarketFixtureSpec;

namespace {

ARSeries series(const std::string& id, std::vector<std::optional<double>> ar) {
    ARSeries s;
    s.event_id = id;
    s.ar = std::move(ar);
    return s;
}

ARSeries constant_series(const std::string& id, double v, std::size_t days = 61) {
    return series(id, std::vector<std::optional<double>>(days, v));
}

const EventStudyResult* find_group(const std::vector<EventStudyResult>& rs, CarGroup g) {
    for (const auto& r : rs) {
        if (r.group == g) return &r;
    }
    return nullptr;
}

std::vector<EventAR> random_events(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> ar(0.0, 0.02);
    std::uniform_int_distribution<int> group(0, 2);
    std::uniform_int_distribution<int> gap(0, 90);
    std::vector<EventAR> events;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::optional<double>> v(61);
        for (auto& x : v) x = ar(rng);
        const int g = gap(rng);
        if (g <= 60) v[static_cast<std::size_t>(g)] = std::nullopt;  // some events end early
        events.push_back({series("E" + std::to_string(1000 + i), v), static_cast<analytics::BiasGroup>(group(rng))});
    }
    return events;
}

}  // namespace

TEST_SUITE("ols") {
    TEST_CASE("matches the normal equations on random designs") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> rows(8, 120);
        for (int instance = 0; instance < 50; ++instance) {
            const auto n = rows(rng);
            DesignMatrix x(n, 6);
            std::vector<std::array<double, 6>> raw(n);
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                raw[i][0] = 1.0;
                for (std::size_t j = 1; j < 6; ++j) raw[i][j] = 0.01 * n01(rng);
                for (std::size_t j = 0; j < 6; ++j) x(i, j) = raw[i][j];
                y[i] = 0.001 * n01(rng) + 0.8 * raw[i][1];
            }
            const auto fit = least_squares(x, y);
            const auto oracle = lmbias::testing::normal_equations<6>(raw, y);
            for (std::size_t j = 0; j < 6; ++j) CHECK(fit.coefficients[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
        }
    }

    TEST_CASE("residuals are orthogonal to every regressor") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> n01(0.0, 1.0);
        const std::size_t n = 100;
        DesignMatrix x(n, 4);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = 1.0;
            for (std::size_t j = 1; j < 4; ++j) x(i, j) = n01(rng);
            y[i] = n01(rng);
        }
        const auto fit = least_squares(x, y);
        double ynorm = 0.0;
        for (double v : y) ynorm += v * v;
        for (std::size_t j = 0; j < 4; ++j) {
            double dotp = 0.0;
            double cnorm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dotp += fit.residuals[i] * x(i, j);
                cnorm += x(i, j) * x(i, j);
            }
            CHECK(std::abs(dotp) <= 1e-8 * std::sqrt(cnorm * ynorm));
        }
        double ssr = 0.0;
        for (double e : fit.residuals) ssr += e * e;
        CHECK(fit.ssr == doctest::Approx(ssr).epsilon(1e-12));
        CHECK(fit.residual_variance == doctest::Approx(ssr / 96.0).epsilon(1e-12));
    }

    TEST_CASE("duplicated column is rank deficient") {
        DesignMatrix x(10, 3);
        std::vector<double> y(10, 1.0);
        for (std::size_t i = 0; i < 10; ++i) {
            x(i, 0) = 1.0;
            x(i, 1) = static_cast<double>(i);
            x(i, 2) = 1.0;
        }
        CHECK_THROWS_AS(least_squares(x, y), RankDeficientError);
    }

    TEST_CASE("more columns than rows is rejected") {
        DesignMatrix x(3, 4);
        std::vector<double> y(3, 0.0);
        CHECK_THROWS_AS(least_squares(x, y), ValidationError);
    }
}

TEST_SUITE("fit_ff5") {
    TEST_CASE("planted market beta is recovered") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        auto fx = make_market_fixture(spec);
        // Rebuild returns as rf + 1.2 mkt_rf exactly.
        ReturnStore returns;
        for (const auto& f : fx.factors.rows()) returns.add({"X", f.date, f.rf + 1.2 * f.mkt_rf});
        const auto fit = fit_ff5("X", "X:FY", returns, fx.factors, fx.calendar, 150);
        CHECK(std::abs(fit.alpha) < 1e-8);
        CHECK(std::abs(fit.betas[0] - 1.2) < 1e-8);
        for (std::size_t j = 1; j < 5; ++j) CHECK(std::abs(fit.betas[j]) < 1e-8);
        CHECK(fit.n_obs == 120);
    }

    TEST_CASE("returns equal to rf give zero coefficients") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        spec.returns_equal_rf = true;
        const auto fx = make_market_fixture(spec);
        const auto fit = fit_ff5("C1000", "e", fx.returns, fx.factors, fx.calendar, 150);
        CHECK(fit.alpha == 0.0);
        for (double b : fit.betas) CHECK(b == 0.0);
    }

    TEST_CASE("all planted coefficients are recovered") {
        MarketFixtureSpec spec;
        spec.companies = 5;
        const auto fx = make_market_fixture(spec);
        for (std::size_t c = 0; c < 5; ++c) {
            const auto fit = fit_ff5(fx.docs[c].company_id, "e", fx.returns, fx.factors, fx.calendar, 150);
            CHECK(std::abs(fit.alpha - fx.coefficients[c][0]) < 1e-8);
            for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(fit.betas[j] - fx.coefficients[c][j + 1]) < 1e-8);
        }
    }

    TEST_CASE("constant factor column is rank deficient") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        const auto fx = make_market_fixture(spec);
        FactorSeries flat;
        for (auto f : fx.factors.rows()) {
            f.smb = 0.001;  // collinear with the intercept
            flat.add(f);
        }
        CHECK_THROWS_AS(fit_ff5("C1000", "e", fx.returns, flat, fx.calendar, 150), RankDeficientError);
    }

    TEST_CASE("too few observations") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        const auto fx = make_market_fixture(spec);
        // Day 0 at index 100 leaves only [-100, -11] = 90 days; ask for 100.
        EventWindow w;
        w.min_obs = 100;
        CHECK_THROWS_AS(fit_ff5("C1000", "e", fx.returns, fx.factors, fx.calendar, 100, w), InsufficientObservations);
        CHECK_NOTHROW(fit_ff5("C1000", "e", fx.returns, fx.factors, fx.calendar, 100));
    }
}

TEST_SUITE("abnormal returns") {
    TEST_CASE("zero-noise data give zero ARs") {
        MarketFixtureSpec spec;
        spec.companies = 3;
        const auto fx = make_market_fixture(spec);
        for (const auto& d : fx.docs) {
            const auto fit = fit_ff5(d.company_id, "e", fx.returns, fx.factors, fx.calendar, 150);
            const auto s = abnormal_returns(fit, fx.returns, fx.factors, fx.calendar, 150);
            CHECK(s.complete_prefix() == 61);
            for (const auto& a : s.ar) CHECK(std::abs(*a) < 1e-8);
        }
    }

    TEST_CASE("a bump on day 5 moves only AR_5") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        const auto base = make_market_fixture(spec);
        spec.planted_ar = [](std::size_t, int day) { return day == 5 ? 0.01 : 0.0; };
        const auto bumped = make_market_fixture(spec);
        const auto f0 = fit_ff5("C1000", "e", base.returns, base.factors, base.calendar, 150);
        const auto f1 = fit_ff5("C1000", "e", bumped.returns, bumped.factors, bumped.calendar, 150);
        const auto a0 = abnormal_returns(f0, base.returns, base.factors, base.calendar, 150);
        const auto a1 = abnormal_returns(f1, bumped.returns, bumped.factors, bumped.calendar, 150);
        for (std::size_t t = 0; t < 61; ++t) {
            const double expected = t == 5 ? 0.01 : 0.0;
            CHECK(std::abs((*a1.ar[t] - *a0.ar[t]) - expected) < 1e-12);
        }
    }

    TEST_CASE("gaps are flagged and no post data is empty") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        const auto fx = make_market_fixture(spec);
        ReturnStore cut;
        for (const auto& r : *fx.returns.find("C1000")) {
            if (r.date < fx.calendar[150] || r.date == fx.calendar[152]) cut.add(r);
        }
        const auto fit = fit_ff5("C1000", "e", cut, fx.factors, fx.calendar, 150);
        const auto s = abnormal_returns(fit, cut, fx.factors, fx.calendar, 150);
        CHECK(s.empty());
        CHECK(s.ar[2].has_value());
        CHECK(s.missing_days.size() == 60);
    }

    TEST_CASE("scale equivariance") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        spec.noise_sd = 0.01;
        spec.planted_ar = [](std::size_t, int day) { return 0.001 * day; };
        const auto fx = make_market_fixture(spec);
        const double k = 3.5;
        FactorSeries f2;
        for (auto f : fx.factors.rows()) {
            f.mkt_rf *= k;
            f.smb *= k;
            f.hml *= k;
            f.rmw *= k;
            f.cma *= k;
            f.rf *= k;
            f2.add(f);
        }
        ReturnStore r2;
        for (auto r : *fx.returns.find("C1000")) {
            r.ret *= k;
            r2.add(r);
        }
        const auto a = abnormal_returns(fit_ff5("C1000", "e", fx.returns, fx.factors, fx.calendar, 150), fx.returns,
                                        fx.factors, fx.calendar, 150);
        const auto b = abnormal_returns(fit_ff5("C1000", "e", r2, f2, fx.calendar, 150), r2, f2, fx.calendar, 150);
        for (std::size_t t = 0; t < 61; ++t) CHECK(*b.ar[t] == doctest::Approx(k * *a.ar[t]).epsilon(1e-9).scale(0.01));
    }
}

TEST_SUITE("group car") {
    TEST_CASE("zero ARs give a zero path") {
        const std::vector<EventAR> events{{constant_series("a", 0.0), analytics::BiasGroup::Positive},
                                          {constant_series("b", 0.0), analytics::BiasGroup::Positive}};
        const auto rs = group_car("m", events);
        REQUIRE(rs.size() == 1);
        for (double v : rs[0].car_path) CHECK(v == 0.0);
        for (const auto& s : rs[0].snapshots) {
            CHECK(format_snapshot(s) == "0.00%");
            CHECK(s.test->p_value == 1.0);
        }
    }

    TEST_CASE("day 0 is inside every horizon") {
        const std::vector<EventAR> events{{constant_series("a", 0.001), analytics::BiasGroup::Negative}};
        const auto rs = group_car("m", events);
        const auto& snap = rs[0].snapshots[1];
        CHECK(snap.horizon == 10);
        CHECK(*snap.car == doctest::Approx(0.011).epsilon(1e-12));
        CHECK(format_percent(*snap.car) == "1.10%");
        CHECK(*rs[0].snapshots[0].car == doctest::Approx(0.002).epsilon(1e-12));
        CHECK_FALSE(snap.test);  // a single event has no test
    }

    TEST_CASE("telescoping and spread identity on random events") {
        std::mt19937_64 rng(17);
        for (int rep = 0; rep < 20; ++rep) {
            const auto events = random_events(rng, 40);
            const auto rs = group_car("m", events);
            for (const auto& r : rs) {
                if (r.group == CarGroup::Spread) continue;
                for (std::size_t t = 1; t < r.car_path.size(); ++t) {
                    // Mean AR_t over the events still in the sample on day t.
                    double sum = 0.0;
                    std::size_t n = 0;
                    double prev_sum = 0.0;
                    for (std::size_t e = 0; e < r.event_car.size(); ++e) {
                        if (r.event_car[e].size() > t) {
                            sum += r.event_car[e][t] - r.event_car[e][t - 1];
                            prev_sum += r.event_car[e][t - 1];
                            ++n;
                        }
                    }
                    REQUIRE(n == r.n_path[t]);
                    // Events that drop out change the mean's base, so the
                    // identity is checked over the surviving events.
                    const double prev_mean_same_events = prev_sum / static_cast<double>(n);
                    CHECK(r.car_path[t] - prev_mean_same_events == doctest::Approx(sum / static_cast<double>(n)).scale(1.0).epsilon(1e-12));
                    if (r.n_path[t] == r.n_path[t - 1]) {
                        CHECK(r.car_path[t] - r.car_path[t - 1] ==
                              doctest::Approx(sum / static_cast<double>(n)).scale(1.0).epsilon(1e-12));
                    }
                }
            }
            const auto* pos = find_group(rs, CarGroup::Positive);
            const auto* neg = find_group(rs, CarGroup::Negative);
            const auto* spread = find_group(rs, CarGroup::Spread);
            REQUIRE(spread != nullptr);
            CHECK(spread->car_path.size() == std::min(pos->car_path.size(), neg->car_path.size()));
            for (std::size_t t = 0; t < spread->car_path.size(); ++t) {
                CHECK(spread->car_path[t] == pos->car_path[t] - neg->car_path[t]);
            }
        }
    }

    TEST_CASE("empty groups are omitted and the spread needs both sides") {
        const std::vector<EventAR> events{{constant_series("a", 0.01), analytics::BiasGroup::Positive},
                                          {constant_series("b", 0.0), analytics::BiasGroup::Neutral}};
        const auto rs = group_car("m", events);
        CHECK(rs.size() == 2);
        CHECK(find_group(rs, CarGroup::Spread) == nullptr);
        CHECK(find_group(rs, CarGroup::Negative) == nullptr);
    }

    TEST_CASE("input order does not matter") {
        std::mt19937_64 rng(23);
        auto events = random_events(rng, 30);
        const auto a = group_car("m", events);
        std::shuffle(events.begin(), events.end(), rng);
        const auto b = group_car("m", events);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].car_path == b[i].car_path);
    }

    TEST_CASE("sign test option") {
        std::vector<EventAR> events;
        for (int i = 0; i < 10; ++i) events.push_back({constant_series("e" + std::to_string(i), i < 8 ? 0.01 : -0.01),
                                                       analytics::BiasGroup::Positive});
        CarOptions opts;
        opts.method = TestMethod::Sign;
        const auto rs = group_car("m", events, opts);
        CHECK(rs[0].snapshots[0].test->p_value == doctest::Approx(0.109375));
    }
}

TEST_SUITE("statistics") {
    TEST_CASE("one-sample t against reference values") {
        const std::vector<double> x{1, 2, 3, 4, 5};
        const auto r = one_sample_t(x);
        REQUIRE(r);
        CHECK(r->statistic == doctest::Approx(4.242640687119285).epsilon(1e-12));
        CHECK(r->p_value == doctest::Approx(0.013235599563682695).epsilon(1e-9));
        CHECK(r->dof == 4.0);
        CHECK(r->stars == "**");
    }

    TEST_CASE("degenerate and symmetric samples") {
        const std::vector<double> same{0.01, 0.01, 0.01};
        const auto d = one_sample_t(same);
        CHECK(std::isinf(d->statistic));
        CHECK(d->p_value == 0.0);
        CHECK(d->stars == "**");
        const std::vector<double> sym{0.3, -0.3, 0.3, -0.3};
        const auto s = one_sample_t(sym);
        CHECK(s->statistic == 0.0);
        CHECK(s->p_value == doctest::Approx(1.0));
        CHECK(s->stars.empty());
        CHECK_FALSE(one_sample_t(std::vector<double>{1.0}));
        CHECK_FALSE(one_sample_t(std::vector<double>{}));
    }

    TEST_CASE("Welch test against reference values") {
        const std::vector<double> a{1, 2, 3, 4};
        const std::vector<double> b{2, 4, 6, 9, 11};
        const auto r = welch_t(a, b);
        REQUIRE(r);
        CHECK(r->statistic == doctest::Approx(-2.2234347239869643).epsilon(1e-12));
        CHECK(r->dof == doctest::Approx(5.181755699189826).epsilon(1e-12));
        CHECK(r->p_value == doctest::Approx(0.07491274505659243).epsilon(1e-9));
        CHECK(r->stars == "*");
        CHECK_FALSE(welch_t(a, std::vector<double>{1.0}));
    }

    TEST_CASE("sign test") {
        std::vector<double> x(10, -1.0);
        x[0] = 1.0;
        CHECK(sign_test(x)->p_value == doctest::Approx(0.021484375));
        std::vector<double> half{1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 0};
        CHECK(sign_test(half)->p_value == doctest::Approx(1.0));
    }

    TEST_CASE("stars") {
        CHECK(stars_for(0.049) == "**");
        CHECK(stars_for(0.05) == "*");
        CHECK(stars_for(0.099) == "*");
        CHECK(stars_for(0.1).empty());
    }

    TEST_CASE("moments and autocorrelation") {
        const std::vector<double> x{0.5, -0.2, 0.3, 0.9, -0.4, 0.1};
        CHECK(lag1_autocorrelation(x) == doctest::Approx(-0.4017857142857142).epsilon(1e-12));
        const auto m = sample_moments(x);
        CHECK(m.mean == doctest::Approx(0.2));
        CHECK(m.variance == doctest::Approx(0.224).epsilon(1e-12));
    }
}

TEST_SUITE("rendering") {
    TEST_CASE("percent format") {
        CHECK(format_percent(0.014) == "1.40%");
        CHECK(format_percent(0.0004) == "0.04%");
        CHECK(format_percent(-0.0115) == "-1.15%");
        CHECK(format_percent(-1e-9) == "0.00%");
        HorizonSnapshot s;
        s.car = -0.0115;
        s.test = TestResult{-2.5, 0.03, 10, "**"};
        CHECK(format_snapshot(s) == "-1.15%**");
        CHECK(format_snapshot(HorizonSnapshot{}) == "n/a");
    }

    TEST_CASE("table row and footnote") {
        EventStudyResult r;
        r.model_id = "GPT-4o";
        r.group = CarGroup::Positive;
        for (auto [h, v] : std::vector<std::pair<int, double>>{{1, 0.0004}, {10, -0.0031}, {30, -0.0046}, {60, -0.0031}}) {
            HorizonSnapshot s;
            s.horizon = h;
            s.car = v;
            r.snapshots.push_back(s);
        }
        const auto table = render_car_tables(std::vector{r});
        CHECK(table.find("0.04%      -0.31%      -0.46%      -0.31%") != std::string::npos);
        CHECK(table.find("*: p<.1, **: p<.05") != std::string::npos);
        const auto csv = car_table_csv(std::vector{r});
        CHECK(csv.rfind("model_id,group,horizon,car,car_pct,t,p,stars,n\n", 0) == 0);
        CHECK(csv.find("GPT-4o,positive,10,-0.0031,-0.31%,,,,0") != std::string::npos);
    }
}

TEST_SUITE("pipeline") {
    TEST_CASE("planted group effects come through") {
        MarketFixtureSpec spec;
        spec.companies = 30;
        spec.noise_sd = 0.002;
        // positive-bias companies drift down, negative ones up
        spec.planted_ar = [](std::size_t c, int) {
            const int g = static_cast<int>(c % 3) - 1;
            return g > 0 ? -0.001 : (g < 0 ? 0.001 : 0.0);
        };
        const auto fx = make_market_fixture(spec);
        const auto run = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar);
        CHECK(run.events_used == 30);
        CHECK(run.skipped.empty());
        const auto* pos = find_group(run.results, CarGroup::Positive);
        const auto* neg = find_group(run.results, CarGroup::Negative);
        const auto* spread = find_group(run.results, CarGroup::Spread);
        REQUIRE(spread);
        CHECK(*pos->snapshots.back().car == doctest::Approx(-0.061).epsilon(0.1));
        CHECK(*neg->snapshots.back().car == doctest::Approx(0.061).epsilon(0.1));
        CHECK(spread->snapshots.back().test->stars == "**");
    }

    TEST_CASE("invalid, unmatched and thin events are skipped with reasons") {
        MarketFixtureSpec spec;
        spec.companies = 3;
        auto fx = make_market_fixture(spec);
        fx.records.push_back(elicit::BiasRecord::make("ZZZ", "FY2022", "mock", elicit::ScoreOutcome::valid(3),
                                                      elicit::ScoreOutcome::valid(4)));
        fx.records.push_back(elicit::BiasRecord::make("C1000", "FY1999", "mock", elicit::ScoreOutcome::no_response(""),
                                                      elicit::ScoreOutcome::valid(4)));
        auto early = fx.docs[0];
        early.fiscal_period = "FY2021";
        early.announcement_at.date = fx.calendar[30];
        fx.docs.push_back(early);
        fx.records.push_back(elicit::BiasRecord::make("C1000", "FY2021", "mock", elicit::ScoreOutcome::valid(3),
                                                      elicit::ScoreOutcome::valid(3)));
        const auto run = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar);
        CHECK(run.events_used == 3);
        CHECK(run.skipped.size() == 3);
    }

    TEST_CASE("overlapping windows can be excluded") {
        MarketFixtureSpec spec;
        spec.companies = 2;
        auto fx = make_market_fixture(spec);
        auto prior = fx.docs[0];
        prior.fiscal_period = "FY2021Q4";
        prior.announcement_at.date = fx.calendar[100];  // inside [150-130, 150-11]
        fx.docs.push_back(prior);
        EventStudyConfig cfg;
        const auto kept = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar, cfg);
        CHECK(kept.events_used == 2);
        cfg.exclude_overlapping = true;
        const auto dropped = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar, cfg);
        CHECK(dropped.events_used == 1);
    }

    TEST_CASE("after-close announcements shift day 0") {
        MarketFixtureSpec spec;
        spec.companies = 1;
        spec.planted_ar = [](std::size_t, int day) { return day == 0 ? 0.05 : 0.0; };
        auto fx = make_market_fixture(spec);
        auto run = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar);
        CHECK(run.results[0].car_path[0] == doctest::Approx(0.05).epsilon(1e-9));
        fx.docs[0].announcement_at.time_of_day = std::chrono::seconds{16 * 3600};
        run = run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar);
        CHECK(std::abs(run.results[0].car_path[0]) < 1e-9);
    }

    TEST_CASE("mixed models are rejected") {
        MarketFixtureSpec spec;
        spec.companies = 2;
        auto fx = make_market_fixture(spec);
        fx.records[1].model_id = "other";
        CHECK_THROWS_AS(run_event_study(fx.records, fx.docs, fx.returns, fx.factors, fx.calendar), ValidationError);
    }
}
