#include "quotecross/date.hpp"

#include <cctype>
#include <cstdio>

namespace quotecross {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// hh:mm[:ss[.frac]] with 2-digit fields.
bool valid_time(std::string_view s) {
    if (s.size() < 5 || s[2] != ':') return false;
    if (!all_digits(s.substr(0, 2)) || !all_digits(s.substr(3, 2))) return false;
    int hh = (s[0] - '0') * 10 + (s[1] - '0');
    int mm = (s[3] - '0') * 10 + (s[4] - '0');
    if (hh > 23 || mm > 59) return false;
    if (s.size() == 5) return true;
    if (s[5] != ':' || s.size() < 8) return false;
    if (!all_digits(s.substr(6, 2))) return false;
    int ss = (s[6] - '0') * 10 + (s[7] - '0');
    if (ss > 60) return false;  // allow leap second
    if (s.size() == 8) return true;
    if (s[8] != '.') return false;
    return all_digits(s.substr(9));
}

bool valid_offset(std::string_view s) {
    if (s == "Z" || s == "z") return true;
    if (s.size() < 3 || (s[0] != '+' && s[0] != '-')) return false;
    std::string_view rest = s.substr(1);
    if (rest.size() == 2) return all_digits(rest);
    if (rest.size() == 4) return all_digits(rest);
    if (rest.size() == 5 && rest[2] == ':') {
        return all_digits(rest.substr(0, 2)) && all_digits(rest.substr(3, 2));
    }
    return false;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) ||
        !all_digits(s.substr(8, 2))) {
        return std::nullopt;
    }
    int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    unsigned m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
    unsigned d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::optional<Date> parse_timestamp_day(std::string_view s) {
    // Trim ASCII whitespace.
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() < 10) return std::nullopt;

    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    if (s.size() == 10) return date;

    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    std::string_view rest = s.substr(11);
    // Split off a trailing zone designator if present.
    std::size_t zone_pos = std::string_view::npos;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        char c = rest[i];
        if (c == 'Z' || c == 'z' || c == '+' || (c == '-' && i > 0)) {
            zone_pos = i;
            break;
        }
    }
    std::string_view time_part = zone_pos == std::string_view::npos ? rest : rest.substr(0, zone_pos);
    if (!valid_time(time_part)) return std::nullopt;
    if (zone_pos != std::string_view::npos && !valid_offset(rest.substr(zone_pos))) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace quotecross
