#include "lmbias/corpus/dates.hpp"

#include <charconv>

#include <fmt/format.h>

#include "lmbias/error.hpp"

namespace lmbias {
namespace {

int read_fixed(std::string_view text, std::size_t pos, std::size_t width, std::string_view whole) {
    if (pos + width > text.size()) throw ParseError(fmt::format("truncated date/time '{}'", whole));
    int value = 0;
    for (std::size_t i = pos; i < pos + width; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw ParseError(fmt::format("invalid digit in '{}'", whole));
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw ParseError(fmt::format("expected '{}' at offset {} in '{}'", c, pos, whole));
    }
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10) throw ParseError(fmt::format("invalid date '{}'", text));
    const int y = read_fixed(text, 0, 4, text);
    expect_char(text, 4, '-', text);
    const int m = read_fixed(text, 5, 2, text);
    expect_char(text, 7, '-', text);
    const int d = read_fixed(text, 8, 2, text);
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw ParseError(fmt::format("invalid calendar date '{}'", text));
    return date;
}

std::string format_date(const Date& d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                       static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

Timestamp parse_timestamp(std::string_view text) {
    Timestamp ts;
    if (text.size() < 10) throw ParseError(fmt::format("invalid timestamp '{}'", text));
    ts.date = parse_date(text.substr(0, 10));
    if (text.size() == 10) return ts;

    if (text[10] != 'T' && text[10] != ' ') {
        throw ParseError(fmt::format("invalid timestamp separator in '{}'", text));
    }
    const int hh = read_fixed(text, 11, 2, text);
    expect_char(text, 13, ':', text);
    const int mm = read_fixed(text, 14, 2, text);
    int ss = 0;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        ss = read_fixed(text, 17, 2, text);
        pos = 19;
    }
    if (hh > 23 || mm > 59 || ss > 59) throw ParseError(fmt::format("invalid time in '{}'", text));
    ts.time_of_day = std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};

    if (pos == text.size()) return ts;
    if (text[pos] == 'Z' && pos + 1 == text.size()) {
        ts.utc_offset = std::chrono::minutes{0};
        return ts;
    }
    if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
        const int oh = read_fixed(text, pos + 1, 2, text);
        expect_char(text, pos + 3, ':', text);
        const int om = read_fixed(text, pos + 4, 2, text);
        const int sign = text[pos] == '-' ? -1 : 1;
        ts.utc_offset = std::chrono::minutes{sign * (oh * 60 + om)};
        return ts;
    }
    throw ParseError(fmt::format("invalid timezone suffix in '{}'", text));
}

std::string format_timestamp(const Timestamp& ts) {
    std::string out = format_date(ts.date);
    if (!ts.time_of_day) return out;
    const auto secs = ts.time_of_day->count();
    out += fmt::format("T{:02d}:{:02d}:{:02d}", secs / 3600, (secs / 60) % 60, secs % 60);
    if (ts.utc_offset) {
        const auto off = ts.utc_offset->count();
        if (off == 0) {
            out += 'Z';
        } else {
            const auto a = off < 0 ? -off : off;
            out += fmt::format("{}{:02d}:{:02d}", off < 0 ? '-' : '+', a / 60, a % 60);
        }
    }
    return out;
}

std::chrono::minutes parse_clock_time(std::string_view text) {
    if (text.size() != 5) throw ParseError(fmt::format("invalid clock time '{}'", text));
    const int hh = read_fixed(text, 0, 2, text);
    expect_char(text, 2, ':', text);
    const int mm = read_fixed(text, 3, 2, text);
    if (hh > 24 || mm > 59 || (hh == 24 && mm != 0)) {
        throw ParseError(fmt::format("invalid clock time '{}'", text));
    }
    return std::chrono::hours{hh} + std::chrono::minutes{mm};
}

Date first_of_month(const Date& d) { return Date{d.year(), d.month(), std::chrono::day{1}}; }

}  // namespace lmbias
