#pragma once
// UTC instants at second precision. Accepts the Twitter API layout
// ("Wed Jan 07 11:07:51 +0000 2015"), ISO-8601 ("2015-01-07T11:07:51Z",
// optional numeric offset) and epoch seconds (Reddit's created_utc).

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "rumor/core/errors.hpp"

namespace rumor::corpus {

using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

inline int month_from_abbrev(std::string_view m) {
    static constexpr std::array<std::string_view, 12> names{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == m) return static_cast<int>(i) + 1;
    return 0;
}

// "+0000", "-0530", "+05:30", "Z"
inline bool parse_offset(std::string_view s, int& seconds) {
    if (s == "Z" || s == "z") {
        seconds = 0;
        return true;
    }
    if (s.size() < 5 || (s[0] != '+' && s[0] != '-')) return false;
    const int sign = s[0] == '-' ? -1 : 1;
    std::string_view rest = s.substr(1);
    int hh = 0, mm = 0;
    if (rest.size() == 4) {
        if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(2, 2), mm)) return false;
    } else if (rest.size() == 5 && rest[2] == ':') {
        if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm)) return false;
    } else {
        return false;
    }
    if (hh > 23 || mm > 59) return false;
    seconds = sign * (hh * 3600 + mm * 60);
    return true;
}

inline bool make_instant(int y, int mo, int d, int h, int mi, int s, int offset, Timestamp& out) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return false;
    out = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - seconds{offset};
    return true;
}

inline bool parse_twitter(std::string_view t, Timestamp& out) {
    // Www Mmm dd hh:mm:ss +zzzz yyyy
    if (t.size() != 30 || t[3] != ' ' || t[7] != ' ' || t[10] != ' ' || t[13] != ':' ||
        t[16] != ':' || t[19] != ' ' || t[25] != ' ')
        return false;
    int d = 0, h = 0, mi = 0, s = 0, y = 0, off = 0;
    const int mo = month_from_abbrev(t.substr(4, 3));
    if (mo == 0 || !parse_int(t.substr(8, 2), d) || !parse_int(t.substr(11, 2), h) ||
        !parse_int(t.substr(14, 2), mi) || !parse_int(t.substr(17, 2), s) ||
        !parse_offset(t.substr(20, 5), off) || !parse_int(t.substr(26, 4), y))
        return false;
    return make_instant(y, mo, d, h, mi, s, off, out);
}

inline bool parse_iso(std::string_view t, Timestamp& out) {
    // YYYY-MM-DDThh:mm:ss[.fff](Z|+hh:mm|+hhmm)
    if (t.size() < 20 || t[4] != '-' || t[7] != '-' || (t[10] != 'T' && t[10] != ' ') ||
        t[13] != ':' || t[16] != ':')
        return false;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, off = 0;
    if (!parse_int(t.substr(0, 4), y) || !parse_int(t.substr(5, 2), mo) ||
        !parse_int(t.substr(8, 2), d) || !parse_int(t.substr(11, 2), h) ||
        !parse_int(t.substr(14, 2), mi) || !parse_int(t.substr(17, 2), s))
        return false;
    std::string_view rest = t.substr(19);
    if (!rest.empty() && rest[0] == '.') {
        std::size_t i = 1;
        while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
        if (i == 1) return false;
        rest = rest.substr(i);  // fractional seconds truncated
    }
    if (!parse_offset(rest, off)) return false;
    return make_instant(y, mo, d, h, mi, s, off, out);
}

inline bool parse_epoch(std::string_view t, Timestamp& out) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) return false;
    out = Timestamp{std::chrono::seconds{static_cast<std::int64_t>(std::floor(v))}};
    return true;
}

}  // namespace detail

inline Timestamp parse_timestamp(std::string_view text) {
    Timestamp out{};
    if (detail::parse_twitter(text, out) || detail::parse_iso(text, out) ||
        detail::parse_epoch(text, out))
        return out;
    throw UnparseableTimestamp("unparseable timestamp '" + std::string(text) + "'");
}

inline Timestamp from_epoch_seconds(double seconds) {
    if (!std::isfinite(seconds)) throw UnparseableTimestamp("non-finite epoch timestamp");
    return Timestamp{std::chrono::seconds{static_cast<std::int64_t>(std::floor(seconds))}};
}

// Canonical form: YYYY-MM-DDThh:mm:ssZ
inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace rumor::corpus
