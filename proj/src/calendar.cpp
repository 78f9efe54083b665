#include "fogrep/calendar.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace fogrep {

namespace {

constexpr Timestamp kSecondsPerDay = 86400;

template <typename Int>
bool parse_fixed(std::string_view text, Int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

CalendarBins calendar_bins(Timestamp t) {
  using namespace std::chrono;
  const Timestamp days = floor_div(t, kSecondsPerDay);
  const Timestamp second_of_day = t - days * kSecondsPerDay;
  const sys_days day{std::chrono::days{days}};
  const year_month_day ymd{day};
  CalendarBins bins;
  bins.hour = static_cast<int>(second_of_day / 3600);
  bins.day_of_week = static_cast<int>(weekday{day}.c_encoding());
  bins.month = static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
  return bins;
}

std::optional<Timestamp> civil_to_unix(int year, int month, int day, int hour,
                                       int minute, int second) {
  using namespace std::chrono;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 ||
      second > 59) {
    return std::nullopt;
  }
  const year_month_day ymd{std::chrono::year{year},
                           std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  const Timestamp days = sys_days{ymd}.time_since_epoch().count();
  return days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

std::optional<Timestamp> parse_utc(std::string_view date, std::string_view time) {
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') return std::nullopt;
  if (time.size() != 8 || time[2] != ':' || time[5] != ':') return std::nullopt;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_fixed(date.substr(0, 4), y) || !parse_fixed(date.substr(5, 2), mo) ||
      !parse_fixed(date.substr(8, 2), d) || !parse_fixed(time.substr(0, 2), h) ||
      !parse_fixed(time.substr(3, 2), mi) || !parse_fixed(time.substr(6, 2), s)) {
    return std::nullopt;
  }
  return civil_to_unix(y, mo, d, h, mi, s);
}

std::string format_utc(Timestamp t) {
  using namespace std::chrono;
  const Timestamp days = floor_div(t, kSecondsPerDay);
  const Timestamp sod = t - days * kSecondsPerDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02lld:%02lld:%02lld",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(sod / 3600),
                static_cast<long long>(sod / 60 % 60), static_cast<long long>(sod % 60));
  return buf;
}

}  // namespace fogrep
