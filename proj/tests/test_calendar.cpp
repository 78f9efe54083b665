#include <doctest.h>

#include "fogrep/calendar.hpp"

using namespace fogrep;

// Expected epochs and weekdays were computed with Python's datetime.

TEST_CASE("civil_to_unix matches reference epochs") {
  CHECK(civil_to_unix(1970, 1, 1, 0, 0, 0) == 0);
  CHECK(civil_to_unix(2008, 10, 24, 2, 9, 59) == 1224814199);
  CHECK(civil_to_unix(2000, 2, 29, 23, 59, 59) == 951868799);
  CHECK(civil_to_unix(1899, 12, 30, 0, 0, 0) == -2209161600);
}

TEST_CASE("impossible dates are rejected") {
  CHECK_FALSE(civil_to_unix(2008, 2, 30, 0, 0, 0));
  CHECK_FALSE(civil_to_unix(2007, 2, 29, 0, 0, 0));
  CHECK_FALSE(civil_to_unix(2008, 13, 1, 0, 0, 0));
  CHECK_FALSE(civil_to_unix(2008, 1, 1, 24, 0, 0));
  CHECK_FALSE(civil_to_unix(2008, 1, 1, 0, 60, 0));
}

TEST_CASE("parse_utc and format_utc round trip") {
  CHECK(parse_utc("2008-10-24", "02:09:59") == 1224814199);
  CHECK_FALSE(parse_utc("2008-10-24", "2:09:59"));
  CHECK_FALSE(parse_utc("2008/10/24", "02:09:59"));
  CHECK_FALSE(parse_utc("2008-10-24", "02:09:5x"));
  CHECK(format_utc(1224814199) == "2008-10-24 02:09:59");
  CHECK(format_utc(-2209161600) == "1899-12-30 00:00:00");
  for (Timestamp t = -100000; t < 100000; t += 7919) {
    const std::string s = format_utc(t);
    CHECK(parse_utc(s.substr(0, 10), s.substr(11)) == t);
  }
}

TEST_CASE("calendar bins") {
  const CalendarBins tue = calendar_bins(1224597600);  // 2008-10-21 14:00 UTC
  CHECK(tue.hour == 14);
  CHECK(tue.day_of_week == 2);
  CHECK(tue.month == 9);
  const CalendarBins epoch = calendar_bins(0);
  CHECK(epoch.day_of_week == 4);
  CHECK(epoch.month == 0);
  const CalendarBins before = calendar_bins(-1);  // 1969-12-31 23:59:59, a Wednesday
  CHECK(before.hour == 23);
  CHECK(before.day_of_week == 3);
  CHECK(before.month == 11);
}
