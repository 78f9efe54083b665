#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fogrep {

/// Absolute UTC time, whole seconds since the unix epoch.
using Timestamp = std::int64_t;
/// Non-negative span of wall-clock time in seconds.
using Seconds = std::int64_t;
using NodeId = std::int32_t;

/// The periodic bins every time-discretized model keys on.
/// day_of_week follows the C convention (0 = Sunday); month is 0-based.
struct CalendarBins {
  int hour = 0;
  int day_of_week = 0;
  int month = 0;
};

CalendarBins calendar_bins(Timestamp t);

/// Civil UTC date/time to unix seconds. Returns nullopt for impossible
/// dates (2008-02-30) or out-of-range clock fields.
std::optional<Timestamp> civil_to_unix(int year, int month, int day, int hour,
                                       int minute, int second);

/// Parses `YYYY-MM-DD` and `HH:MM:SS` as UTC.
std::optional<Timestamp> parse_utc(std::string_view date, std::string_view time);

/// `YYYY-MM-DD HH:MM:SS` in UTC.
std::string format_utc(Timestamp t);

}  // namespace fogrep
