#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fogrep/trajectory.hpp"
#include "support.hpp"

using namespace fogrep;
using testing::kPltHeader;

namespace {

std::vector<TrackPoint> points_at(const std::vector<Timestamp>& ts) {
  std::vector<TrackPoint> out;
  for (auto t : ts) out.push_back({"u", t, 39.9, 116.4});
  return out;
}

std::string plt_line(double lat, double lon, const std::string& date, const std::string& time) {
  std::ostringstream s;
  s << lat << ',' << lon << ",0,492,39745.1," << date << ',' << time << '\n';
  return s.str();
}

}  // namespace

TEST_CASE("PLT record maps fields directly") {
  std::istringstream in(kPltHeader + "39.906631,116.385564,0,492,39745.1,2008-10-24,02:09:59\n");
  const auto r = parse_plt_stream(in, "000");
  REQUIRE(r.points.size() == 1);
  CHECK(r.warnings == 0);
  CHECK(r.points[0].user_id == "000");
  CHECK(r.points[0].lat == 39.906631);
  CHECK(r.points[0].lon == 116.385564);
  CHECK(r.points[0].timestamp == 1224814199);
}

TEST_CASE("header lines never produce points, even if they look like records") {
  std::string header = kPltHeader;
  // Make header line 3 a syntactically valid record.
  header.replace(header.find("Altitude is in Feet"), 19, "39.9,116.4,0,0,0,2008-10-24,00:00:00");
  std::istringstream in(header);
  const auto r = parse_plt_stream(in, "u");
  CHECK(r.points.empty());
  CHECK(r.warnings == 0);
}

TEST_CASE("malformed and out-of-range records are skipped and counted") {
  std::string body = kPltHeader;
  body += "91.0,116.4,0,492,39745.1,2008-10-24,02:09:59\n";
  body += "39.9,181.0,0,492,39745.1,2008-10-24,02:09:59\n";
  body += "39.9,116.4,0,492\n";
  body += "abc,116.4,0,492,39745.1,2008-10-24,02:09:59\n";
  body += "39.9,116.4,0,492,39745.1,2008-13-24,02:09:59\n";
  body += "39.9,116.4,0,492,39745.1,2008-10-24,02:09:59,extra\n";
  body += "39.9,116.4,0,492,39745.1,2008-10-24,02:10:00\r\n";
  std::istringstream in(body);
  const auto r = parse_plt_stream(in, "u");
  CHECK(r.warnings == 6);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].timestamp == 1224814200);
}

TEST_CASE("unreadable file is a hard error naming the path") {
  try {
    parse_plt_file("/nonexistent/dir/x.plt", "u");
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/x.plt") != std::string::npos);
  }
}

TEST_CASE("normalize sorts and keeps the first of duplicate timestamps") {
  std::vector<TrackPoint> pts = {{"u", 30, 1, 1}, {"u", 10, 2, 2}, {"u", 30, 3, 3}, {"u", 20, 4, 4}};
  CHECK(normalize_points(pts) == 1);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].timestamp == 10);
  CHECK(pts[1].timestamp == 20);
  CHECK(pts[2].timestamp == 30);
  CHECK(pts[2].lat == 1);  // the first t=30 in input order
}

TEST_CASE("split_sessions") {
  SUBCASE("one gap above the threshold") {
    // gaps 10, 20, 7200, 15
    const auto s = split_sessions(points_at({0, 10, 30, 7230, 7245}), 600);
    REQUIRE(s.size() == 2);
    CHECK(s[0].points.size() == 3);
    CHECK(s[1].points.size() == 2);
    CHECK(s[0].start == 0);
    CHECK(s[0].end == 30);
    CHECK(s[1].start == 7230);
  }
  SUBCASE("gap equal to the threshold stays in the session") {
    CHECK(split_sessions(points_at({0, 600, 1200}), 600).size() == 1);
    CHECK(split_sessions(points_at({0, 601}), 600).size() == 2);
  }
  SUBCASE("single point") {
    const auto s = split_sessions(points_at({42}), 600);
    REQUIRE(s.size() == 1);
    CHECK(s[0].start == 42);
    CHECK(s[0].end == 42);
  }
  SUBCASE("empty") { CHECK(split_sessions({}, 600).empty()); }
}

TEST_CASE("session partition property on pseudo-random gaps") {
  std::vector<Timestamp> ts;
  Timestamp t = 0;
  std::uint64_t x = 12345;
  for (int i = 0; i < 2000; ++i) {
    x = x * 6364136223846793005ULL + 1442695040888963407ULL;
    t += static_cast<Timestamp>((x >> 33) % 1300);
    ts.push_back(t);
  }
  const auto pts = points_at(ts);
  const auto sessions = split_sessions(pts, 600);
  std::size_t total = 0;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    total += sessions[i].points.size();
    for (std::size_t j = 1; j < sessions[i].points.size(); ++j) {
      CHECK(sessions[i].points[j].timestamp - sessions[i].points[j - 1].timestamp <= 600);
    }
    if (i > 0) {
      CHECK(sessions[i - 1].end < sessions[i].start);
      CHECK(sessions[i].start - sessions[i - 1].end > 600);
    }
  }
  CHECK(total == pts.size());
}

TEST_CASE("dataset loading: filter, merge of interleaved files, empty root") {
  const auto root = testing::fresh_dir("geolife_small");
  // Two files for user 000 whose fixes interleave in time.
  testing::write_text(root / "000/Trajectory/b.plt",
                      kPltHeader + plt_line(39.9, 116.4, "2008-10-24", "00:00:10") +
                          plt_line(39.9, 116.4, "2008-10-24", "00:00:30"));
  testing::write_text(root / "000/Trajectory/a.plt",
                      kPltHeader + plt_line(39.8, 116.3, "2008-10-24", "00:00:00") +
                          plt_line(39.8, 116.3, "2008-10-24", "00:00:20") +
                          plt_line(39.8, 116.3, "2008-10-24", "00:00:30"));
  testing::write_text(root / "001/Trajectory/a.plt",
                      kPltHeader + plt_line(39.8, 116.3, "2008-10-25", "00:00:00"));
  testing::write_text(root / "002/Trajectory/empty.plt", kPltHeader);

  IngestStats stats;
  const auto all = load_user_points(root, std::nullopt, &stats);
  CHECK(all.size() == 2);  // 002 has no valid fix
  CHECK(stats.files == 4);
  CHECK(stats.duplicates == 1);

  // Brute-force oracle: every fix of both files, sorted, first duplicate kept.
  const auto& u0 = all.at("000");
  const std::vector<Timestamp> expected_t = {0, 10, 20, 30};
  REQUIRE(u0.size() == expected_t.size());
  for (std::size_t i = 0; i < u0.size(); ++i) CHECK(u0[i].timestamp - 1224806400 == expected_t[i]);
  CHECK(u0[3].lat == 39.8);  // a.plt is read first

  const auto filtered = load_dataset(root, std::set<std::string>{"000"});
  CHECK(filtered.size() == 1);
  CHECK(filtered.count("000") == 1);

  const auto empty = testing::fresh_dir("geolife_empty");
  CHECK(load_dataset(empty, std::nullopt).empty());
  CHECK_THROWS_AS(load_dataset(empty / "missing", std::nullopt), IngestError);
}

TEST_CASE("normalized format round trip is exact") {
  UserPoints users;
  users["a"] = {{"a", 1224814199, 39.906631, 116.385564}, {"a", 1224814200, 0.1 + 0.2, -179.999999}};
  users["b"] = {{"b", -5, -90.0, 180.0}};
  std::stringstream ss;
  write_normalized(ss, users);
  const std::string text = ss.str();
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.rfind("a\t1224814199\t39.906631\t116.385564\n", 0) == 0);
  const UserPoints back = read_normalized(ss);
  CHECK(back == users);
}
