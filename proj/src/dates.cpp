#include "windowbench/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace wb {

namespace {

// Howard Hinnant's civil date algorithms.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days_impl(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Date make_date(int year, int month, int day) {
    return Date{static_cast<int32_t>(days_from_civil(year, static_cast<unsigned>(month),
                                                     static_cast<unsigned>(day)))};
}

void civil_from_days(Date d, int& year, int& month, int& day) {
    unsigned m, dd;
    civil_from_days_impl(d.days, year, m, dd);
    month = static_cast<int>(m);
    day = static_cast<int>(dd);
}

Date parse_date(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw std::runtime_error("malformed date: '" + std::string(iso) + "'");
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!is_digit(iso[i]))
            throw std::runtime_error("malformed date: '" + std::string(iso) + "'");
    int y = (iso[0] - '0') * 1000 + (iso[1] - '0') * 100 + (iso[2] - '0') * 10 + (iso[3] - '0');
    int m = (iso[5] - '0') * 10 + (iso[6] - '0');
    int d = (iso[8] - '0') * 10 + (iso[9] - '0');
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::runtime_error("malformed date: '" + std::string(iso) + "'");
    Date out = make_date(y, m, d);
    int ry, rm, rd;
    civil_from_days(out, ry, rm, rd);
    if (ry != y || rm != m || rd != d)
        throw std::runtime_error("invalid calendar date: '" + std::string(iso) + "'");
    return out;
}

std::string format_date(Date d) {
    int y, m, dd;
    civil_from_days(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, dd);
    return buf;
}

int years_between(Date birth, Date on) {
    int by, bm, bd, oy, om, od;
    civil_from_days(birth, by, bm, bd);
    civil_from_days(on, oy, om, od);
    int years = oy - by;
    if (om < bm || (om == bm && od < bd)) --years;
    return years;
}

}  // namespace wb
