#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace wb {

// Calendar date as days since 1970-01-01, proleptic Gregorian.
struct Date {
    int32_t days = 0;

    friend auto operator<=>(const Date&, const Date&) = default;
    Date operator+(int d) const { return Date{days + d}; }
    Date operator-(int d) const { return Date{days - d}; }
    int operator-(Date o) const { return days - o.days; }
};

Date make_date(int year, int month, int day);
void civil_from_days(Date d, int& year, int& month, int& day);

// "YYYY-MM-DD"; throws std::runtime_error on malformed input.
Date parse_date(std::string_view iso);
std::string format_date(Date d);

// Completed years from `birth` to `on` (negative inputs are the caller's problem).
int years_between(Date birth, Date on);

}  // namespace wb
