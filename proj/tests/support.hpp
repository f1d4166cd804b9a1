#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lmbias/corpus/calendar.hpp"
#include "lmbias/corpus/dates.hpp"
#include "lmbias/corpus/io.hpp"
#include "lmbias/corpus/types.hpp"
#include "lmbias/elicit/records.hpp"

namespace lmbias::testing {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(LMBIAS_TEST_DATA_DIR); }

class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("lmbias-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Date ymd(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

// Monday–Friday days starting at `start`.
inline TradingCalendar weekday_calendar(Date start, std::size_t n) {
    std::vector<Date> days;
    std::chrono::sys_days d{start};
    while (days.size() < n) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) days.emplace_back(d);
        d += std::chrono::days{1};
    }
    return TradingCalendar(std::move(days));
}

// Synthetic companies whose excess returns follow a known FF5 model plus a
// planted abnormal return after each announcement.
struct MarketFixture {
    TradingCalendar calendar;
    FactorSeries factors;
    ReturnStore returns;
    std::vector<PerformanceDoc> docs;
    std::vector<elicit::BiasRecord> records;
    // Per company: alpha then five betas.
    std::vector<std::array<double, 6>> coefficients;
    std::vector<std::size_t> day0;
};

struct MarketFixtureSpec {
    std::size_t companies = 12;
    std::size_t days = 260;
    std::size_t announce_index = 150;  // calendar index of every announcement
    double noise_sd = 0.0;
    // Returns equal to rf on every day, so every coefficient and AR is 0.
    bool returns_equal_rf = false;
    std::uint64_t seed = 7;
    // Abnormal return for (company, relative day >= 0).
    std::function<double(std::size_t, int)> planted_ar = [](std::size_t, int) { return 0.0; };
    // Bias assigned to company i.
    std::function<int(std::size_t)> beta = [](std::size_t i) { return static_cast<int>(i % 3) - 1; };
    std::string model_id = "mock";
};

inline MarketFixture make_market_fixture(const MarketFixtureSpec& spec) {
    MarketFixture fx;
    fx.calendar = weekday_calendar(ymd(2022, 1, 3), spec.days);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> fac(0.0, 0.01);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> coef(-0.5, 1.5);

    for (std::size_t t = 0; t < fx.calendar.size(); ++t) {
        fx.factors.add(FactorRecord{fx.calendar[t], fac(rng), fac(rng), fac(rng), fac(rng), fac(rng), 0.00002});
    }
    const auto& rows = fx.factors.rows();
    for (std::size_t c = 0; c < spec.companies; ++c) {
        std::array<double, 6> b{};
        b[0] = 0.0002 * (static_cast<double>(c % 5) - 2.0);
        for (std::size_t j = 1; j < 6; ++j) b[j] = coef(rng);
        fx.coefficients.push_back(b);
        const auto id = "C" + std::to_string(1000 + c);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const auto& f = rows[t];
            double r = f.rf + b[0] + b[1] * f.mkt_rf + b[2] * f.smb + b[3] * f.hml + b[4] * f.rmw + b[5] * f.cma;
            if (spec.noise_sd > 0) r += spec.noise_sd * noise(rng);
            const long rel = static_cast<long>(t) - static_cast<long>(spec.announce_index);
            if (rel >= 0) r += spec.planted_ar(c, static_cast<int>(rel));
            if (spec.returns_equal_rf) r = f.rf;
            fx.returns.add(ReturnRecord{id, f.date, r});
        }
        PerformanceDoc doc;
        doc.company_id = id;
        doc.company_name = "Company " + std::to_string(c);
        doc.announcement_at = Timestamp{fx.calendar[spec.announce_index], std::chrono::seconds{13 * 3600}, std::nullopt};
        doc.fiscal_period = "FY2022";
        doc.text = "Sales increased.";
        fx.docs.push_back(doc);
        const int beta = spec.beta(c);
        const int su = 3;
        fx.records.push_back(elicit::BiasRecord::make(id, "FY2022", spec.model_id, elicit::ScoreOutcome::valid(su),
                                                      elicit::ScoreOutcome::valid(su + beta)));
        fx.day0.push_back(spec.announce_index);
    }
    return fx;
}

// Writes a fixture as the CLI's input files into `dir`.
inline void write_market_fixture(const MarketFixture& fx, const fs::path& dir) {
    {
        std::ofstream out(dir / "docs.jsonl", std::ios::binary);
        for (const auto& d : fx.docs) out << doc_to_json_line(d) << '\n';
    }
    {
        std::ofstream out(dir / "bias.jsonl", std::ios::binary);
        elicit::write_bias(out, fx.records);
    }
    {
        std::ofstream out(dir / "factors.csv", std::ios::binary);
        out << "date,mkt_rf,smb,hml,rmw,cma,rf\n";
        for (const auto& f : fx.factors.rows()) out << factor_to_csv_row(f) << '\n';
    }
    {
        std::ofstream out(dir / "returns.csv", std::ios::binary);
        out << "company_id,date,ret\n";
        for (const auto& d : fx.docs) {
            for (const auto& r : *fx.returns.find(d.company_id)) out << return_to_csv_row(r) << '\n';
        }
    }
    {
        std::ofstream out(dir / "calendar.txt", std::ios::binary);
        for (const auto& d : fx.calendar.days()) out << format_date(d) << '\n';
    }
}

}  // namespace lmbias::testing
