#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace lmbias {

using Date = std::chrono::year_month_day;

// Wall-clock timestamp as written in the input. Times are read as local time
// of the listing exchange; an explicit UTC offset is preserved for output but
// does not shift the wall-clock fields.
struct Timestamp {
    Date date{};
    std::optional<std::chrono::seconds> time_of_day;
    std::optional<std::chrono::minutes> utc_offset;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// "YYYY-MM-DD"; throws ParseError.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" with optional "Z" or "+HH:MM"/"-HH:MM".
// A single space is accepted in place of 'T'.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp& ts);

// "HH:MM" → offset from midnight.
std::chrono::minutes parse_clock_time(std::string_view text);

Date first_of_month(const Date& d);

}  // namespace lmbias
