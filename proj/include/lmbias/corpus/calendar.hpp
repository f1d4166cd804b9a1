#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lmbias/corpus/dates.hpp"

namespace lmbias {

// Sorted list of exchange trading days. Relative event days are offsets into
// this list.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> days);  // must be strictly increasing

    std::size_t size() const { return days_.size(); }
    const Date& operator[](std::size_t i) const { return days_[i]; }
    const std::vector<Date>& days() const { return days_; }

    std::optional<std::size_t> index_of(const Date& d) const;
    // First trading day on or after d.
    std::optional<std::size_t> first_on_or_after(const Date& d) const;
    // Index `offset` trading days away from `base`, if inside the calendar.
    std::optional<std::size_t> shift(std::size_t base, long offset) const;

private:
    std::vector<Date> days_;
};

// One ISO date per line; blank lines and '#' comments ignored.
TradingCalendar parse_calendar(std::istream& in);
TradingCalendar load_calendar(const std::filesystem::path& path);

struct DayZeroRule {
    // Announcements at or after this local time map to the next trading day.
    // Tokyo Stock Exchange afternoon close.
    std::chrono::minutes close_cutoff{15 * 60};
};

// Index of event day 0. Date-only timestamps count as before the cutoff.
// Throws ValidationError if the calendar does not cover the announcement.
std::size_t event_day_zero(const Timestamp& announcement_at, const TradingCalendar& calendar,
                           const DayZeroRule& rule = {});

}  // namespace lmbias
