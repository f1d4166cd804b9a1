#include "lmbias/corpus/calendar.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "lmbias/error.hpp"

namespace lmbias {

TradingCalendar::TradingCalendar(std::vector<Date> days) : days_(std::move(days)) {
    for (std::size_t i = 1; i < days_.size(); ++i) {
        if (!(days_[i - 1] < days_[i])) {
            throw ValidationError(fmt::format("calendar not strictly increasing at {}", format_date(days_[i])));
        }
    }
}

std::optional<std::size_t> TradingCalendar::index_of(const Date& d) const {
    const auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

std::optional<std::size_t> TradingCalendar::first_on_or_after(const Date& d) const {
    const auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

std::optional<std::size_t> TradingCalendar::shift(std::size_t base, long offset) const {
    const long target = static_cast<long>(base) + offset;
    if (target < 0 || target >= static_cast<long>(days_.size())) return std::nullopt;
    return static_cast<std::size_t>(target);
}

TradingCalendar parse_calendar(std::istream& in) {
    std::vector<Date> days;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t");
        try {
            days.push_back(parse_date(std::string_view(line).substr(first, last - first + 1)));
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("calendar line {}: {}", line_no, e.what()));
        }
    }
    return TradingCalendar(std::move(days));
}

TradingCalendar load_calendar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return parse_calendar(in);
}

std::size_t event_day_zero(const Timestamp& announcement_at, const TradingCalendar& calendar,
                           const DayZeroRule& rule) {
    const Date& day = announcement_at.date;
    if (calendar.size() == 0 || day < calendar[0] || calendar[calendar.size() - 1] < day) {
        throw ValidationError(fmt::format("trading calendar does not cover {}", format_date(day)));
    }
    const auto idx = calendar.first_on_or_after(day);
    if (!idx) throw ValidationError(fmt::format("no trading day on or after {}", format_date(day)));

    const bool is_trading_day = calendar[*idx] == day;
    const bool after_close = announcement_at.time_of_day &&
                             *announcement_at.time_of_day >= std::chrono::duration_cast<std::chrono::seconds>(rule.close_cutoff);
    if (is_trading_day && after_close) {
        const auto next = calendar.shift(*idx, 1);
        if (!next) throw ValidationError(fmt::format("trading calendar ends at {}", format_date(day)));
        return *next;
    }
    return *idx;
}

}  // namespace lmbias
