#include "fogrep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "fogrep/kernels.hpp"

namespace fogrep {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Relative slack on the haversine term inside which two nodes count as
// equidistant. Far below GPS resolution at any grid spacing.
constexpr double kTieTolerance = 1e-12;

}  // namespace

GridNetwork::GridNetwork(int rows, int cols, GeoBounds bounds, Seconds transfer_time,
                         Seconds buffer)
    : rows_(rows), cols_(cols), bounds_(bounds), transfer_time_(transfer_time), buffer_(buffer) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs rows >= 1 and cols >= 1");
  if (!(bounds.lat_min < bounds.lat_max) || !(bounds.lon_min < bounds.lon_max)) {
    throw std::invalid_argument("grid bounds must satisfy lat_min < lat_max and lon_min < lon_max");
  }
  if (bounds.lat_min < -90.0 || bounds.lat_max > 90.0 || bounds.lon_min < -180.0 ||
      bounds.lon_max > 180.0) {
    throw std::invalid_argument("grid bounds outside WGS84 range");
  }
  if (transfer_time < 0 || buffer < 0) {
    throw std::invalid_argument("transfer_time and buffer must be non-negative");
  }

  const double dlat = (bounds.lat_max - bounds.lat_min) / rows;
  const double dlon = (bounds.lon_max - bounds.lon_min) / cols;
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  centers_.reserve(n);
  sin_lat_.reserve(n);
  cos_lat_.reserve(n);
  sin_lon_.reserve(n);
  cos_lon_.reserve(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double lat = bounds.lat_min + (r + 0.5) * dlat;
      const double lon = bounds.lon_min + (c + 0.5) * dlon;
      centers_.push_back({node_id(r, c), lat, lon});
      sin_lat_.push_back(std::sin(lat * kDegToRad));
      cos_lat_.push_back(std::cos(lat * kDegToRad));
      sin_lon_.push_back(std::sin(lon * kDegToRad));
      cos_lon_.push_back(std::cos(lon * kDegToRad));
    }
  }
}

NodeId GridNetwork::closest_node(double lat, double lon) const {
  lat = std::clamp(lat, bounds_.lat_min, bounds_.lat_max);
  lon = std::clamp(lon, bounds_.lon_min, bounds_.lon_max);
  const kernels::PointTrig p{std::sin(lat * kDegToRad), std::cos(lat * kDegToRad),
                             std::sin(lon * kDegToRad), std::cos(lon * kDegToRad)};
  const kernels::TrigTable table{sin_lat_, cos_lat_, sin_lon_, cos_lon_};

  // 8x8 default grid; keep small grids off the heap.
  constexpr std::size_t kInline = 256;
  double inline_buf[kInline];
  std::vector<double> heap_buf;
  std::span<double> terms;
  if (centers_.size() <= kInline) {
    terms = std::span<double>(inline_buf, centers_.size());
  } else {
    heap_buf.resize(centers_.size());
    terms = heap_buf;
  }
  kernels::active_kernels().haversine_terms(p, table, terms);

  const double best = *std::min_element(terms.begin(), terms.end());
  const double limit = best + std::max(std::abs(best) * kTieTolerance, 1e-300);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] <= limit) return static_cast<NodeId>(i);
  }
  return 0;  // unreachable: best itself satisfies the limit
}

std::vector<NodeVisit> visits_from_session(const GridNetwork& grid, const Session& session,
                                           std::size_t session_index) {
  std::vector<NodeVisit> visits;
  for (const auto& p : session.points) {
    const NodeId node = grid.closest_node(p.lat, p.lon);
    if (!visits.empty() && visits.back().node_id == node) continue;
    if (!visits.empty()) visits.back().departure = p.timestamp;
    visits.push_back({session.user_id, node, p.timestamp, p.timestamp, session_index});
  }
  if (!visits.empty()) visits.back().departure = session.points.back().timestamp;
  return visits;
}

std::vector<NodeVisit> visits_from_sessions(const GridNetwork& grid,
                                            std::span<const Session> sessions) {
  std::vector<NodeVisit> all;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    auto v = visits_from_session(grid, sessions[i], i);
    all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return all;
}

void write_visits(std::ostream& out, std::span<const NodeVisit> visits) {
  for (const auto& v : visits) {
    out << v.user_id << '\t' << v.node_id << '\t' << v.arrival << '\t' << v.departure << '\n';
  }
}

}  // namespace fogrep
