#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fogrep/calendar.hpp"
#include "fogrep/trajectory.hpp"

namespace fogrep {

struct GeoBounds {
  double lat_min = 39.75;
  double lat_max = 40.05;
  double lon_min = 116.15;
  double lon_max = 116.65;

  friend bool operator==(const GeoBounds&, const GeoBounds&) = default;
};

struct NodeCenter {
  NodeId id = 0;
  double lat = 0.0;
  double lon = 0.0;
};

/// Evenly spaced rows x cols grid of fog nodes. Node (r, c) has id
/// r * cols + c and sits at the center of its cell. Immutable once built.
class GridNetwork {
 public:
  static constexpr Seconds kDefaultTransferTime = 300;

  /// Throws std::invalid_argument when an invariant is violated.
  GridNetwork(int rows, int cols, GeoBounds bounds = {},
              Seconds transfer_time = kDefaultTransferTime, Seconds buffer = 0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int node_count() const { return rows_ * cols_; }
  const GeoBounds& bounds() const { return bounds_; }
  Seconds transfer_time() const { return transfer_time_; }
  Seconds buffer() const { return buffer_; }

  NodeId node_id(int row, int col) const { return row * cols_ + col; }
  const std::vector<NodeCenter>& node_centers() const { return centers_; }

  /// Node whose center is nearest on the sphere; points outside the bounds
  /// are clamped first. Ties go to the lowest node id.
  NodeId closest_node(double lat, double lon) const;

 private:
  int rows_;
  int cols_;
  GeoBounds bounds_;
  Seconds transfer_time_;
  Seconds buffer_;
  std::vector<NodeCenter> centers_;
  std::vector<double> sin_lat_, cos_lat_, sin_lon_, cos_lon_;
};

/// A maximal stay of one user at one node.
struct NodeVisit {
  std::string user_id;
  NodeId node_id = 0;
  Timestamp arrival = 0;
  Timestamp departure = 0;
  std::size_t session_index = 0;

  Seconds duration() const { return departure - arrival; }

  friend bool operator==(const NodeVisit&, const NodeVisit&) = default;
};

/// Collapses runs of fixes with the same closest node. A run ends when the
/// next run's first fix arrives; the final run ends at its own last fix.
std::vector<NodeVisit> visits_from_session(const GridNetwork& grid, const Session& session,
                                           std::size_t session_index);

/// All visits of one user, sessions in order.
std::vector<NodeVisit> visits_from_sessions(const GridNetwork& grid,
                                            std::span<const Session> sessions);

/// `user_id\tnode_id\tarrival_unix\tdeparture_unix`
void write_visits(std::ostream& out, std::span<const NodeVisit> visits);

}  // namespace fogrep
