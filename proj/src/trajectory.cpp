#include "fogrep/trajectory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace fogrep {

namespace fs = std::filesystem;

namespace {

constexpr int kPltHeaderLines = 6;

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

// Splits on `sep` into at most N fields; returns the number of fields seen
// (N + 1 signals "too many").
template <std::size_t N>
std::size_t split_fields(std::string_view line, char sep,
                         std::array<std::string_view, N>& fields) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (count == N) return N + 1;
    fields[count++] = line.substr(pos, next == std::string_view::npos ? next : next - pos);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return count;
}

std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
  return line;
}

bool valid_coordinate(double lat, double lon) {
  return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

PltParseResult parse_plt_stream(std::istream& in, std::string_view user_id) {
  PltParseResult result;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no <= kPltHeaderLines) continue;
    const std::string_view line = chomp(raw);
    if (line.empty()) continue;

    std::array<std::string_view, 7> f;
    double lat = 0.0, lon = 0.0;
    if (split_fields(line, ',', f) != 7 || !parse_double(f[0], lat) ||
        !parse_double(f[1], lon) || !valid_coordinate(lat, lon)) {
      ++result.warnings;
      continue;
    }
    const auto ts = parse_utc(f[5], f[6]);
    if (!ts) {
      ++result.warnings;
      continue;
    }
    result.points.push_back(TrackPoint{std::string(user_id), *ts, lat, lon});
  }
  return result;
}

PltParseResult parse_plt_file(const fs::path& path, std::string_view user_id) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read trajectory file: " + path.string());
  return parse_plt_stream(in, user_id);
}

std::size_t normalize_points(std::vector<TrackPoint>& points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const TrackPoint& a, const TrackPoint& b) { return a.timestamp < b.timestamp; });
  const auto last = std::unique(points.begin(), points.end(),
                                [](const TrackPoint& a, const TrackPoint& b) {
                                  return a.timestamp == b.timestamp;
                                });
  const auto dropped = static_cast<std::size_t>(points.end() - last);
  points.erase(last, points.end());
  return dropped;
}

std::vector<Session> split_sessions(std::span<const TrackPoint> points, Seconds gap_threshold) {
  std::vector<Session> sessions;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == 0 || points[i].timestamp - points[i - 1].timestamp > gap_threshold) {
      Session s;
      s.user_id = points[i].user_id;
      s.start = points[i].timestamp;
      sessions.push_back(std::move(s));
    }
    Session& cur = sessions.back();
    cur.points.push_back(points[i]);
    cur.end = points[i].timestamp;
  }
  return sessions;
}

UserPoints load_user_points(const fs::path& root,
                            const std::optional<std::set<std::string>>& user_filter,
                            IngestStats* stats) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IngestError("dataset root does not exist or is not a directory: " + root.string());
  }

  std::vector<std::string> users;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    if (user_filter && !user_filter->contains(name)) continue;
    users.push_back(std::move(name));
  }
  std::sort(users.begin(), users.end());

  IngestStats local;
  UserPoints out;
  for (const auto& user : users) {
    const fs::path traj_dir = root / user / "Trajectory";
    if (!fs::is_directory(traj_dir, ec)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(traj_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".plt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    std::vector<TrackPoint> merged;
    for (const auto& file : files) {
      auto parsed = parse_plt_file(file, user);
      ++local.files;
      local.warnings += parsed.warnings;
      merged.insert(merged.end(), std::make_move_iterator(parsed.points.begin()),
                    std::make_move_iterator(parsed.points.end()));
    }
    local.duplicates += normalize_points(merged);
    if (merged.empty()) continue;
    local.points += merged.size();
    out.emplace(user, std::move(merged));
  }
  if (stats) *stats = local;
  return out;
}

Dataset sessions_from_points(const UserPoints& users, Seconds gap_threshold) {
  Dataset out;
  for (const auto& [user, points] : users) {
    auto sessions = split_sessions(points, gap_threshold);
    if (!sessions.empty()) out.emplace(user, std::move(sessions));
  }
  return out;
}

Dataset load_dataset(const fs::path& root, const std::optional<std::set<std::string>>& user_filter,
                     Seconds gap_threshold, IngestStats* stats) {
  return sessions_from_points(load_user_points(root, user_filter, stats), gap_threshold);
}

void write_normalized(std::ostream& out, const UserPoints& users) {
  for (const auto& [user, points] : users) {
    for (const auto& p : points) {
      out << user << '\t' << p.timestamp << '\t' << format_double(p.lat) << '\t'
          << format_double(p.lon) << '\n';
    }
  }
}

UserPoints read_normalized(std::istream& in) {
  UserPoints users;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (line.empty()) continue;
    std::array<std::string_view, 4> f;
    TrackPoint p;
    if (split_fields(line, '\t', f) != 4 || !parse_double(f[2], p.lat) ||
        !parse_double(f[3], p.lon)) {
      throw IngestError("malformed normalized trajectory record at line " +
                        std::to_string(line_no));
    }
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), p.timestamp);
    if (ec != std::errc{} || ptr != f[1].data() + f[1].size() || f[0].empty()) {
      throw IngestError("malformed normalized trajectory record at line " +
                        std::to_string(line_no));
    }
    p.user_id = std::string(f[0]);
    users[p.user_id].push_back(std::move(p));
  }
  for (auto& [user, points] : users) normalize_points(points);
  return users;
}

UserPoints read_normalized_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read normalized trajectory file: " + path.string());
  return read_normalized(in);
}

}  // namespace fogrep
