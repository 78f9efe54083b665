#pragma once

// Discrete-event replay of users' node visits under a replication policy.
// The ledger history it produces is the sole input of the metrics.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogrep/grid.hpp"
#include "fogrep/temporal.hpp"

namespace fogrep {

class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PolicyConfig {
  enum class Kind { KeepOnClosest, AlwaysOnAll, TFomm };

  Kind kind = Kind::KeepOnClosest;
  TemporalConfig temporal;     // TFomm only
  std::size_t fan_out = 1;     // TFomm only, >= 1

  static PolicyConfig keep_on_closest() { return {Kind::KeepOnClosest, {}, 1}; }
  static PolicyConfig always_on_all() { return {Kind::AlwaysOnAll, {}, 1}; }
  static PolicyConfig tfomm(TemporalConfig temporal, std::size_t fan_out = 1) {
    return {Kind::TFomm, temporal, fan_out};
  }

  /// "keep_on_closest", "always_on_all" or "tfomm".
  std::string policy_name() const;
  /// Temporal label for TFomm ("mean", "pctl30", ...), "-" otherwise.
  std::string variant() const;
};

/// One stretch during which a node held (or was downloading) a user's data.
struct HoldingInterval {
  enum class Kind { Transfer, Replica };

  std::string user_id;
  NodeId node_id = 0;
  Timestamp from = 0;
  Timestamp to = 0;
  Kind kind = Kind::Replica;

  friend bool operator==(const HoldingInterval&, const HoldingInterval&) = default;
};

/// Live replica state per (user, node) plus the append-only interval
/// history. A node is at most one of: downloading, holding.
class ReplicaLedger {
 public:
  enum class State { None, InFlight, Held };

  State state(const std::string& user, NodeId node) const;
  bool holds(const std::string& user, NodeId node) const { return state(user, node) == State::Held; }

  /// Begins a download; returns its token. Throws if the node is not empty.
  std::uint64_t start_transfer(const std::string& user, NodeId node, Timestamp t);

  /// Turns the download identified by `token` into a replica. False (and no
  /// change) if that download was aborted meanwhile.
  bool complete_transfer(const std::string& user, NodeId node, Timestamp t, std::uint64_t token);

  /// Removes a replica or aborts a download, closing its interval at t.
  void drop(const std::string& user, NodeId node, Timestamp t);
  void drop_all(const std::string& user, Timestamp t);

  /// Nodes in a non-None state for the user, ascending.
  std::vector<NodeId> occupied(const std::string& user) const;

  const std::vector<HoldingInterval>& history() const { return history_; }

 private:
  struct Entry {
    State state = State::None;
    Timestamp since = 0;
    std::uint64_t token = 0;
  };

  void close(const std::string& user, NodeId node, const Entry& e, Timestamp t);

  std::map<std::string, std::map<NodeId, Entry>> live_;
  std::vector<HoldingInterval> history_;
  std::uint64_t next_token_ = 1;
};

/// Every user's visits, in time order, keyed by user id.
using VisitStreams = std::map<std::string, std::vector<NodeVisit>>;

/// Optional record of policy decisions, for diagnostics and tests.
struct TraceEntry {
  enum class Action { Scheduled, Started, Completed, Dropped, Cancelled };

  Timestamp time = 0;
  std::string user_id;
  NodeId node_id = 0;
  Action action = Action::Started;
  Timestamp at = 0;  // Scheduled: planned start time

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SimulationOptions {
  bool record_trace = false;
};

struct SimulationResult {
  std::vector<HoldingInterval> history;  // closed intervals, in closing order
  VisitStreams presence;                 // the replayed visits
  std::vector<TraceEntry> trace;         // only with record_trace
};

/// Throws SimulationError when the visit streams are not well formed
/// (unsorted, overlapping, or not tiling their sessions).
void validate_visit_streams(const VisitStreams& visits);

SimulationResult run_simulation(const VisitStreams& visits, const GridNetwork& grid,
                                const PolicyConfig& policy, const SimulationOptions& options = {});

/// `user,node,from_unix,to_unix` for intervals of the given kind.
void write_ledger_csv(std::ostream& out, std::span<const HoldingInterval> history,
                      HoldingInterval::Kind kind);

}  // namespace fogrep
