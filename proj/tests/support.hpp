#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fogrep/calendar.hpp"
#include "fogrep/grid.hpp"
#include "fogrep/simulation.hpp"

namespace testing {

inline fogrep::NodeVisit visit(const std::string& user, fogrep::NodeId node, fogrep::Timestamp a,
                               fogrep::Timestamp d, std::size_t session = 0) {
  return {user, node, a, d, session};
}

// Back-to-back visits starting at t0, one session.
inline std::vector<fogrep::NodeVisit> chain(const std::string& user,
                                            const std::vector<fogrep::NodeId>& nodes,
                                            fogrep::Seconds stay, fogrep::Timestamp t0 = 0,
                                            std::size_t session = 0) {
  std::vector<fogrep::NodeVisit> out;
  fogrep::Timestamp t = t0;
  for (auto n : nodes) {
    out.push_back(visit(user, n, t, t + stay, session));
    t += stay;
  }
  return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(FOGREP_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const std::string kPltHeader =
    "Geolife trajectory\nWGS 84\nAltitude is in Feet\nReserved 3\n"
    "0,2,255,My Track,0,0,2,8421376\n0\n";

// Small GeoLife-shaped tree: `users` users shuttling between three places on
// the default 8x8 grid, one PLT file per day, points every 60 s.
inline void write_toy_dataset(const std::filesystem::path& root, int users = 3, int days = 4) {
  const double places[][2] = {{39.80, 116.20}, {39.95, 116.45}, {40.02, 116.60}};
  for (int u = 0; u < users; ++u) {
    char id[8];
    std::snprintf(id, sizeof id, "%03d", u);
    for (int d = 0; d < days; ++d) {
      const fogrep::Timestamp day = 1224460800 + 86400 * d + 3600 * u;  // 2008-10-20
      std::string body = kPltHeader;
      // Three morning stays then a break, then the evening stays.
      const int stays[] = {40 + 10 * u, 30 + 5 * d, 20, 0, 35, 25 + u};
      fogrep::Timestamp t = day;
      for (int k = 0; k < 6; ++k) {
        if (stays[k] == 0) {
          t += 7200;
          continue;
        }
        const auto& p = places[(k + u) % 3];
        for (int i = 0; i < stays[k]; ++i, t += 60) {
          const std::string when = fogrep::format_utc(t);
          std::ostringstream line;
          line << p[0] << ',' << p[1] << ",0,100,39745.0," << when.substr(0, 10) << ','
               << when.substr(11) << "\r\n";
          body += line.str();
        }
      }
      write_text(root / id / "Trajectory" / (std::to_string(20081020 + d) + "000000.plt"), body);
    }
  }
}

}  // namespace testing
