#pragma once

// GeoLife trajectory ingestion: PLT parsing, per-user merge, presence
// sessions and the normalized TSV interchange format.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fogrep/calendar.hpp"

namespace fogrep {

inline constexpr Seconds kDefaultSessionGap = 600;

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrackPoint {
  std::string user_id;
  Timestamp timestamp = 0;
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// A maximal run of fixes with no gap above the session threshold.
/// Points are stored in time order; start/end mirror the first/last fix.
struct Session {
  std::string user_id;
  std::vector<TrackPoint> points;
  Timestamp start = 0;
  Timestamp end = 0;
};

struct PltParseResult {
  std::vector<TrackPoint> points;
  std::size_t warnings = 0;  // malformed or out-of-range records
};

/// Parses one GeoLife .plt file. Six header lines are skipped; malformed
/// records are counted, not fatal. Throws IngestError when the file cannot
/// be opened.
PltParseResult parse_plt_file(const std::filesystem::path& path, std::string_view user_id);

/// Same as parse_plt_file but over an already-open stream.
PltParseResult parse_plt_stream(std::istream& in, std::string_view user_id);

/// Sorts by timestamp (stable) and drops later fixes that repeat an earlier
/// timestamp. Returns the number of dropped duplicates.
std::size_t normalize_points(std::vector<TrackPoint>& points);

std::vector<Session> split_sessions(std::span<const TrackPoint> points, Seconds gap_threshold);

using UserPoints = std::map<std::string, std::vector<TrackPoint>>;
using Dataset = std::map<std::string, std::vector<Session>>;

struct IngestStats {
  std::size_t files = 0;
  std::size_t points = 0;
  std::size_t warnings = 0;
  std::size_t duplicates = 0;
};

/// Reads `root/<user>/Trajectory/*.plt` for every user (or just the ones in
/// `user_filter`), merged and normalized per user. Users and files are
/// visited in lexicographic order so the result never depends on directory
/// enumeration order. Users without any valid fix are omitted.
UserPoints load_user_points(const std::filesystem::path& root,
                            const std::optional<std::set<std::string>>& user_filter,
                            IngestStats* stats = nullptr);

Dataset load_dataset(const std::filesystem::path& root,
                     const std::optional<std::set<std::string>>& user_filter,
                     Seconds gap_threshold = kDefaultSessionGap,
                     IngestStats* stats = nullptr);

Dataset sessions_from_points(const UserPoints& users, Seconds gap_threshold);

/// `user_id\tunix_seconds\tlat\tlon\n`, sorted by (user_id, timestamp).
/// Coordinates use the shortest representation that round-trips exactly.
void write_normalized(std::ostream& out, const UserPoints& users);
UserPoints read_normalized(std::istream& in);
UserPoints read_normalized_file(const std::filesystem::path& path);

}  // namespace fogrep
