#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace quotecross {

// All analysis runs at day granularity; a Date is a count of days since
// the civil epoch.
using Date = std::chrono::sys_days;

// Parses "YYYY-MM-DD". Rejects impossible calendar dates (e.g. Feb 30).
std::optional<Date> parse_date(std::string_view s);

// Parses an ISO-8601 date or date-time ("YYYY-MM-DD", optionally followed
// by 'T' or ' ' and hh:mm[:ss[.frac]][Z|+hh[:mm]|-hh[:mm]]) and truncates
// to the calendar date as written. No timezone conversion is applied.
std::optional<Date> parse_timestamp_day(std::string_view s);

std::string format_date(Date d);

// Whole days from a to b (positive when b is later).
inline long days_between(Date a, Date b) {
    return (b - a).count();
}

}  // namespace quotecross
