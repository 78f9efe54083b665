// Deterministic GeoLife-format trace generator.
//
// Writes <out>/<user>/Trajectory/<yyyymmddHHMMSS>.plt for a handful of
// commuter-like users around Beijing: fixed home/work places, a few
// favourite spots, weekday and weekend routines with jitter. One file per
// tracked day; the night gap separates sessions.
//
// Random numbers come from mt19937_64 with hand-written transforms so the
// output is identical on every standard library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogrep/calendar.hpp"

namespace fs = std::filesystem;

namespace {

constexpr double kLatMin = 39.75, kLatMax = 40.05;
constexpr double kLonMin = 116.15, kLonMax = 116.65;
constexpr int kGrid = 8;
constexpr std::int64_t kLocalOffset = 8 * 3600;  // traces are stored in UTC
constexpr std::int64_t kDay = 86400;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }
  bool chance(double p) { return uniform() < p; }
  // Irwin-Hall approximation keeps to + and * only.
  double normal(double mu, double sigma) {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return mu + sigma * (s - 6.0);
  }

 private:
  std::mt19937_64 eng_;
};

struct Place {
  double lat, lon;
};

Place place_in_cell(Rng& rng, int row, int col) {
  const double dlat = (kLatMax - kLatMin) / kGrid;
  const double dlon = (kLonMax - kLonMin) / kGrid;
  // Stay well inside the cell so GPS jitter never flips the closest node.
  return {kLatMin + (row + 0.5 + rng.uniform(-0.25, 0.25)) * dlat,
          kLonMin + (col + 0.5 + rng.uniform(-0.25, 0.25)) * dlon};
}

struct Fix {
  std::int64_t t;  // unix seconds, UTC
  double lat, lon;
};

class Track {
 public:
  Track(Rng& rng, std::int64_t t) : rng_(rng), t_(t) {}

  std::int64_t now() const { return t_; }

  void stay(const Place& p, std::int64_t until) {
    while (t_ < until) {
      emit(p, 0.00015);
      t_ += 240 + rng_.index(60);
    }
  }

  void travel(const Place& from, const Place& to, double kmh) {
    const double dy = (to.lat - from.lat) * 111.0;
    const double dx = (to.lon - from.lon) * 85.0;
    const double km = std::sqrt(dx * dx + dy * dy);
    const auto seconds = static_cast<std::int64_t>(km / kmh * 3600.0) + 60;
    const std::int64_t start = t_;
    while (t_ < start + seconds) {
      const double f = static_cast<double>(t_ - start) / static_cast<double>(seconds);
      emit({from.lat + f * (to.lat - from.lat), from.lon + f * (to.lon - from.lon)}, 0.0001);
      t_ += 60;
    }
  }

  const std::vector<Fix>& fixes() const { return fixes_; }

 private:
  void emit(const Place& p, double jitter) {
    fixes_.push_back({t_, p.lat + rng_.normal(0.0, jitter / 3.0), p.lon + rng_.normal(0.0, jitter / 3.0)});
  }

  Rng& rng_;
  std::int64_t t_;
  std::vector<Fix> fixes_;
};

struct Profile {
  Place home, work;
  std::vector<Place> spots;
  Place via;  // fixed waypoint on the commute
  double wake_hour;
  double work_hours;
  double kmh;
};

Profile make_profile(Rng& rng) {
  Profile p;
  const int hr = 1 + rng.index(6), hc = 1 + rng.index(6);
  p.home = place_in_cell(rng, hr, hc);
  int wr, wc;
  do {
    wr = rng.index(kGrid);
    wc = rng.index(kGrid);
  } while (std::abs(wr - hr) + std::abs(wc - hc) < 3);
  p.work = place_in_cell(rng, wr, wc);
  p.via = place_in_cell(rng, std::min((hr + wr) / 2 + rng.index(2), kGrid - 1), (hc + wc) / 2);
  const int n = 3 + rng.index(3);
  for (int i = 0; i < n; ++i) {
    const int r = std::clamp(hr + rng.index(5) - 2, 0, kGrid - 1);
    const int c = std::clamp(hc + rng.index(5) - 2, 0, kGrid - 1);
    p.spots.push_back(place_in_cell(rng, r, c));
  }
  p.wake_hour = rng.uniform(6.0, 7.5);
  p.work_hours = rng.uniform(8.0, 9.5);
  p.kmh = rng.uniform(18.0, 35.0);
  return p;
}

std::int64_t at_hour(std::int64_t local_midnight_utc, double hour) {
  return local_midnight_utc + static_cast<std::int64_t>(hour * 3600.0);
}

void weekday(Rng& rng, const Profile& p, Track& tr, std::int64_t day0) {
  tr.stay(p.home, at_hour(day0, p.wake_hour + rng.normal(0.9, 0.25)));
  tr.travel(p.home, p.via, p.kmh);
  if (rng.chance(0.3)) tr.stay(p.via, tr.now() + 600 + rng.index(900));
  tr.travel(p.via, p.work, p.kmh);
  const std::int64_t lunch = at_hour(day0, rng.normal(12.0, 0.2));
  tr.stay(p.work, lunch);
  if (rng.chance(0.35)) {
    const Place& s = p.spots[static_cast<std::size_t>(rng.index(static_cast<int>(p.spots.size())))];
    tr.travel(p.work, s, p.kmh);
    tr.stay(s, tr.now() + 1800 + rng.index(1800));
    tr.travel(s, p.work, p.kmh);
  }
  const double leave = p.wake_hour + 2.0 + p.work_hours + rng.normal(0.0, 0.4);
  tr.stay(p.work, at_hour(day0, leave));
  tr.travel(p.work, p.via, p.kmh);
  tr.travel(p.via, p.home, p.kmh);
  if (rng.chance(0.4)) {
    tr.stay(p.home, tr.now() + 1800 + rng.index(3600));
    const Place& s = p.spots[static_cast<std::size_t>(rng.index(static_cast<int>(p.spots.size())))];
    tr.travel(p.home, s, p.kmh);
    tr.stay(s, tr.now() + 3600 + rng.index(5400));
    tr.travel(s, p.home, p.kmh);
  }
  tr.stay(p.home, std::max(tr.now() + 1200, at_hour(day0, rng.normal(22.5, 0.4))));
}

void weekend(Rng& rng, const Profile& p, Track& tr, std::int64_t day0) {
  tr.stay(p.home, at_hour(day0, p.wake_hour + rng.normal(2.5, 0.6)));
  const int outings = 1 + rng.index(3);
  Place at = p.home;
  for (int i = 0; i < outings; ++i) {
    const Place& s = p.spots[static_cast<std::size_t>(rng.index(static_cast<int>(p.spots.size())))];
    tr.travel(at, s, p.kmh);
    tr.stay(s, tr.now() + 2400 + rng.index(7200));
    at = s;
  }
  tr.travel(at, p.home, p.kmh);
  tr.stay(p.home, std::max(tr.now() + 1200, at_hour(day0, rng.normal(22.5, 0.5))));
}

void write_plt(const fs::path& dir, const std::vector<Fix>& fixes) {
  if (fixes.empty()) return;
  // format_utc gives "YYYY-MM-DD HH:MM:SS".
  const std::string first = fogrep::format_utc(fixes.front().t);
  std::string name;
  for (char c : first) {
    if (c >= '0' && c <= '9') name.push_back(c);
  }
  std::ofstream out(dir / (name + ".plt"), std::ios::binary);
  out << "Geolife trajectory\r\nWGS 84\r\nAltitude is in Feet\r\nReserved 3\r\n"
         "0,2,255,My Track,0,0,2,8421376\r\n0\r\n";
  const std::int64_t excel_epoch = *fogrep::civil_to_unix(1899, 12, 30, 0, 0, 0);
  for (const Fix& f : fixes) {
    const std::string stamp = fogrep::format_utc(f.t);
    char line[160];
    std::snprintf(line, sizeof line, "%.6f,%.6f,0,%d,%.10f,%.10s,%s\r\n", f.lat, f.lon, 150,
                  static_cast<double>(f.t - excel_epoch) / kDay, stamp.c_str(), stamp.c_str() + 11);
    out << line;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic GeoLife-format trace set"};
  std::string out_dir;
  int users = 10, days = 42;
  std::uint64_t seed = 20081006;
  app.add_option("--out", out_dir, "output root (contains <user>/Trajectory)")->required();
  app.add_option("--users", users, "number of users")->check(CLI::Range(1, 999));
  app.add_option("--days", days, "days per user")->check(CLI::Range(1, 3650));
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  // 2008-10-06 is a Monday.
  const std::int64_t first_day = *fogrep::civil_to_unix(2008, 10, 6, 0, 0, 0) / kDay;
  for (int u = 0; u < users; ++u) {
    Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(u));
    const Profile profile = make_profile(rng);
    char id[16];
    std::snprintf(id, sizeof id, "%03d", u);
    const fs::path dir = fs::path(out_dir) / id / "Trajectory";
    fs::create_directories(dir);
    std::size_t points = 0;
    for (int day = 0; day < days; ++day) {
      if (rng.chance(0.08)) continue;  // not tracked that day
      const std::int64_t local_midnight = (first_day + day) * kDay - kLocalOffset;
      Track track(rng, at_hour(local_midnight, profile.wake_hour - 0.5));
      if (day % 7 < 5) {
        weekday(rng, profile, track, local_midnight);
      } else {
        weekend(rng, profile, track, local_midnight);
      }
      write_plt(dir, track.fixes());
      points += track.fixes().size();
    }
    std::cout << id << ": " << points << " points\n";
  }
  return 0;
}
