#include "fogrep/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <queue>
#include <tuple>

#include "fogrep/fomm.hpp"

namespace fogrep {

// ---------------------------------------------------------------------------
// Policy labels

std::string PolicyConfig::policy_name() const {
  switch (kind) {
    case Kind::KeepOnClosest: return "keep_on_closest";
    case Kind::AlwaysOnAll: return "always_on_all";
    case Kind::TFomm: return "tfomm";
  }
  return "?";
}

std::string PolicyConfig::variant() const {
  if (kind != Kind::TFomm) return "-";
  std::string v = temporal.label();
  if (fan_out != 1) v += "_k" + std::to_string(fan_out);
  return v;
}

// ---------------------------------------------------------------------------
// Ledger

ReplicaLedger::State ReplicaLedger::state(const std::string& user, NodeId node) const {
  auto u = live_.find(user);
  if (u == live_.end()) return State::None;
  auto n = u->second.find(node);
  return n == u->second.end() ? State::None : n->second.state;
}

std::uint64_t ReplicaLedger::start_transfer(const std::string& user, NodeId node, Timestamp t) {
  Entry& e = live_[user][node];
  if (e.state != State::None) {
    throw SimulationError("transfer started at a node that is not empty");
  }
  e = {State::InFlight, t, next_token_++};
  return e.token;
}

bool ReplicaLedger::complete_transfer(const std::string& user, NodeId node, Timestamp t,
                                      std::uint64_t token) {
  auto u = live_.find(user);
  if (u == live_.end()) return false;
  auto n = u->second.find(node);
  if (n == u->second.end() || n->second.state != State::InFlight || n->second.token != token) {
    return false;
  }
  close(user, node, n->second, t);
  n->second = {State::Held, t, token};
  return true;
}

void ReplicaLedger::drop(const std::string& user, NodeId node, Timestamp t) {
  auto u = live_.find(user);
  if (u == live_.end()) return;
  auto n = u->second.find(node);
  if (n == u->second.end()) return;
  close(user, node, n->second, t);
  u->second.erase(n);
}

void ReplicaLedger::drop_all(const std::string& user, Timestamp t) {
  for (NodeId node : occupied(user)) drop(user, node, t);
}

std::vector<NodeId> ReplicaLedger::occupied(const std::string& user) const {
  std::vector<NodeId> nodes;
  auto u = live_.find(user);
  if (u == live_.end()) return nodes;
  for (const auto& [node, e] : u->second) {
    if (e.state != State::None) nodes.push_back(node);
  }
  return nodes;
}

void ReplicaLedger::close(const std::string& user, NodeId node, const Entry& e, Timestamp t) {
  if (e.state == State::None || t <= e.since) return;
  history_.push_back({user, node, e.since, t,
                      e.state == State::Held ? HoldingInterval::Kind::Replica
                                             : HoldingInterval::Kind::Transfer});
}

// ---------------------------------------------------------------------------
// Input validation

void validate_visit_streams(const VisitStreams& visits) {
  for (const auto& [user, stream] : visits) {
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const NodeVisit& v = stream[i];
      if (v.user_id != user) {
        throw SimulationError("visit of user '" + v.user_id + "' filed under '" + user + "'");
      }
      if (v.departure < v.arrival) {
        throw SimulationError("visit departs before it arrives (user " + user + ")");
      }
      if (i == 0) continue;
      const NodeVisit& prev = stream[i - 1];
      if (v.session_index == prev.session_index) {
        if (v.arrival != prev.departure || v.node_id == prev.node_id) {
          throw SimulationError("visits of one session do not tile it (user " + user + ")");
        }
      } else if (v.session_index < prev.session_index || v.arrival <= prev.departure) {
        throw SimulationError("sessions out of order or overlapping (user " + user + ")");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Event loop

namespace {

enum class EventKind : std::uint8_t {
  UserDepart,
  SessionEnd,
  SessionStart,
  UserArrive,
  ReplicationComplete,
  ReplicationStart,
};

struct Event {
  Timestamp time;
  EventKind kind;
  std::uint32_t user;
  NodeId node;
  std::uint64_t token;  // replication events: identifies the live request
  std::uint64_t seq;

  auto key() const { return std::tie(time, kind, user, node, seq); }
  bool operator>(const Event& o) const { return key() > o.key(); }
};

struct UserState {
  const std::string* id = nullptr;
  const std::vector<NodeVisit>* visits = nullptr;

  // Cursor over the user's own trace: session start, then arrive/depart per
  // visit, then session end. Only the next trace event is ever queued, so a
  // user's own events keep their natural order even at equal timestamps.
  std::size_t next_visit = 0;
  enum class Phase { SessionStart, Arrive, Depart, SessionEnd, Done } phase = Phase::SessionStart;

  bool in_session = false;
  std::optional<std::size_t> current_visit;
  std::vector<NodeId> predicted;
  struct Pending {
    Timestamp at;
    std::uint64_t token;
  };
  std::map<NodeId, Pending> pending;

  std::unique_ptr<FommModel> fomm;
  std::unique_ptr<TemporalPredictor> temporal;
};

class Simulator {
 public:
  Simulator(const VisitStreams& visits, const GridNetwork& grid, const PolicyConfig& policy,
            const SimulationOptions& options)
      : grid_(grid), policy_(policy), options_(options) {
    users_.reserve(visits.size());
    for (const auto& [id, stream] : visits) {
      UserState u;
      u.id = &id;
      u.visits = &stream;
      if (policy.kind == PolicyConfig::Kind::TFomm) {
        u.fomm = std::make_unique<FommModel>(id);
        u.temporal = make_temporal_predictor(policy.temporal);
      }
      users_.push_back(std::move(u));
    }
  }

  SimulationResult run() {
    for (std::uint32_t i = 0; i < users_.size(); ++i) advance_trace(i);
    Timestamp now = std::numeric_limits<Timestamp>::min();
    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      if (e.time < now) throw SimulationError("event queue went back in time");
      now = e.time;
      dispatch(e);
    }
    for (const auto& u : users_) {
      if (!ledger_.occupied(*u.id).empty()) {
        throw SimulationError("replicas outlived the last session of user " + *u.id);
      }
    }
    SimulationResult result;
    result.history = ledger_.history();
    result.trace = std::move(trace_);
    return result;
  }

 private:
  void push(Timestamp t, EventKind kind, std::uint32_t user, NodeId node = 0,
            std::uint64_t token = 0) {
    queue_.push(Event{t, kind, user, node, token, seq_++});
  }

  void note(Timestamp t, const UserState& u, NodeId node, TraceEntry::Action action,
            Timestamp at = 0) {
    if (options_.record_trace) trace_.push_back({t, *u.id, node, action, at});
  }

  // Queues the user's next trace event, if any.
  void advance_trace(std::uint32_t ui) {
    UserState& u = users_[ui];
    const auto& v = *u.visits;
    using Phase = UserState::Phase;
    switch (u.phase) {
      case Phase::SessionStart:
        if (u.next_visit >= v.size()) {
          u.phase = Phase::Done;
          return;
        }
        push(v[u.next_visit].arrival, EventKind::SessionStart, ui);
        u.phase = Phase::Arrive;
        return;
      case Phase::Arrive:
        push(v[u.next_visit].arrival, EventKind::UserArrive, ui, v[u.next_visit].node_id);
        u.phase = Phase::Depart;
        return;
      case Phase::Depart: {
        const std::size_t i = u.next_visit;
        push(v[i].departure, EventKind::UserDepart, ui, v[i].node_id);
        ++u.next_visit;
        const bool session_continues =
            u.next_visit < v.size() && v[u.next_visit].session_index == v[i].session_index;
        u.phase = session_continues ? Phase::Arrive : Phase::SessionEnd;
        return;
      }
      case Phase::SessionEnd:
        push(v[u.next_visit - 1].departure, EventKind::SessionEnd, ui);
        u.phase = Phase::SessionStart;
        return;
      case Phase::Done:
        return;
    }
  }

  void dispatch(const Event& e) {
    UserState& u = users_[e.user];
    switch (e.kind) {
      case EventKind::SessionStart:
        on_session_start(u, e.time);
        advance_trace(e.user);
        break;
      case EventKind::UserArrive:
        on_arrival(e.user, u, e.time);
        advance_trace(e.user);
        break;
      case EventKind::UserDepart:
        on_departure(u, e.time);
        advance_trace(e.user);
        break;
      case EventKind::SessionEnd:
        on_session_end(u, e.time);
        advance_trace(e.user);
        break;
      case EventKind::ReplicationStart:
        on_replication_start(e.user, u, e.node, e.time, e.token);
        break;
      case EventKind::ReplicationComplete:
        on_replication_complete(u, e.node, e.time, e.token);
        break;
    }
  }

  // --- helpers --------------------------------------------------------------

  bool lacks_replica(const UserState& u, NodeId node) const {
    return ledger_.state(*u.id, node) == ReplicaLedger::State::None;
  }

  void start_download(std::uint32_t ui, UserState& u, NodeId node, Timestamp t) {
    const std::uint64_t token = ledger_.start_transfer(*u.id, node, t);
    note(t, u, node, TraceEntry::Action::Started);
    push(t + grid_.transfer_time(), EventKind::ReplicationComplete, ui, node, token);
  }

  void drop(UserState& u, NodeId node, Timestamp t) {
    ledger_.drop(*u.id, node, t);
    note(t, u, node, TraceEntry::Action::Dropped);
  }

  void cancel_pending(UserState& u, NodeId node, Timestamp t) {
    if (u.pending.erase(node) > 0) note(t, u, node, TraceEntry::Action::Cancelled);
  }

  void schedule(std::uint32_t ui, UserState& u, NodeId node, Timestamp at, Timestamp now) {
    const std::uint64_t token = next_request_++;
    u.pending[node] = {at, token};
    note(now, u, node, TraceEntry::Action::Scheduled, at);
    push(at, EventKind::ReplicationStart, ui, node, token);
  }

  const NodeVisit& visit(const UserState& u) const { return (*u.visits)[*u.current_visit]; }

  static bool contains(const std::vector<NodeId>& v, NodeId n) {
    return std::find(v.begin(), v.end(), n) != v.end();
  }

  std::vector<NodeId> predict_nodes(const UserState& u, const NodeVisit& at) const {
    std::vector<NodeId> nodes;
    for (const auto& p : u.fomm->predict_next(at, policy_.fan_out)) {
      if (p.node != at.node_id) nodes.push_back(p.node);
    }
    return nodes;
  }

  // --- handlers -------------------------------------------------------------

  void on_session_start(UserState& u, Timestamp t) {
    u.in_session = true;
    if (policy_.kind == PolicyConfig::Kind::AlwaysOnAll) {
      const auto ui = static_cast<std::uint32_t>(&u - users_.data());
      for (NodeId n = 0; n < grid_.node_count(); ++n) start_download(ui, u, n, t);
    }
  }

  void on_session_end(UserState& u, Timestamp t) {
    for (NodeId node : ledger_.occupied(*u.id)) drop(u, node, t);
    while (!u.pending.empty()) cancel_pending(u, u.pending.begin()->first, t);
    u.in_session = false;
    u.current_visit.reset();
    u.predicted.clear();
  }

  void on_arrival(std::uint32_t ui, UserState& u, Timestamp t) {
    if (!u.in_session) throw SimulationError("arrival outside a session");
    // The trace cursor still points at the visit being arrived at.
    u.current_visit = u.next_visit;
    const NodeVisit& here = visit(u);
    const NodeId node = here.node_id;

    switch (policy_.kind) {
      case PolicyConfig::Kind::AlwaysOnAll:
        return;

      case PolicyConfig::Kind::KeepOnClosest:
        // Only the closest node may hold or fetch the data.
        for (NodeId other : ledger_.occupied(*u.id)) {
          if (other != node) drop(u, other, t);
        }
        if (lacks_replica(u, node)) start_download(ui, u, node, t);
        return;

      case PolicyConfig::Kind::TFomm: {
        cancel_pending(u, node, t);
        if (lacks_replica(u, node)) start_download(ui, u, node, t);

        u.predicted = predict_nodes(u, here);
        if (!u.predicted.empty()) {
          const auto stay = u.temporal->predict({node, here.arrival, t});
          Timestamp delay = 0;
          if (stay) {
            const auto lead = grid_.transfer_time() + grid_.buffer();
            delay = std::max<Timestamp>(0, std::llround(*stay) - lead);
          }
          for (NodeId p : u.predicted) {
            if (lacks_replica(u, p)) schedule(ui, u, p, t + delay, t);
          }
        }
        for (NodeId other : ledger_.occupied(*u.id)) {
          if (other != node && !contains(u.predicted, other) &&
              ledger_.holds(*u.id, other)) {
            drop(u, other, t);
          }
        }
        for (auto it = u.pending.begin(); it != u.pending.end();) {
          const NodeId n = (it++)->first;
          if (!contains(u.predicted, n)) cancel_pending(u, n, t);
        }
        return;
      }
    }
  }

  void on_departure(UserState& u, Timestamp t) {
    if (!u.current_visit) throw SimulationError("departure without a matching arrival");
    if (policy_.kind != PolicyConfig::Kind::TFomm) return;

    const NodeVisit& leaving = visit(u);
    const std::size_t next = *u.current_visit + 1;
    const bool moves_on = next < u.visits->size() &&
                          (*u.visits)[next].session_index == leaving.session_index;

    // Training happens only once the stay is over.
    if (moves_on) u.fomm->observe_transition(leaving, (*u.visits)[next].node_id);
    if (leaving.duration() > 0) {
      u.temporal->record(DurationSample::make(leaving.node_id, leaving.arrival, leaving.duration()));
    }

    if (moves_on) {
      NodeVisit upcoming = (*u.visits)[next];
      upcoming.arrival = t;
      const std::vector<NodeId> keep = predict_nodes(u, upcoming);
      for (auto it = u.pending.begin(); it != u.pending.end();) {
        const NodeId n = (it++)->first;
        if (!contains(keep, n)) cancel_pending(u, n, t);
      }
    }
  }

  void on_replication_start(std::uint32_t ui, UserState& u, NodeId node, Timestamp t,
                            std::uint64_t token) {
    auto it = u.pending.find(node);
    if (it == u.pending.end() || it->second.token != token) return;  // superseded
    u.pending.erase(it);
    if (u.in_session && lacks_replica(u, node)) start_download(ui, u, node, t);
  }

  void on_replication_complete(UserState& u, NodeId node, Timestamp t, std::uint64_t token) {
    if (!ledger_.complete_transfer(*u.id, node, t, token)) return;  // aborted
    note(t, u, node, TraceEntry::Action::Completed);
    if (policy_.kind == PolicyConfig::Kind::TFomm) {
      const bool here = u.current_visit && visit(u).node_id == node;
      if (!here && !contains(u.predicted, node)) drop(u, node, t);
    }
  }

  const GridNetwork& grid_;
  const PolicyConfig& policy_;
  const SimulationOptions& options_;
  std::vector<UserState> users_;
  ReplicaLedger ledger_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  std::vector<TraceEntry> trace_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_request_ = 1;
};

}  // namespace

SimulationResult run_simulation(const VisitStreams& visits, const GridNetwork& grid,
                                const PolicyConfig& policy, const SimulationOptions& options) {
  if (policy.kind == PolicyConfig::Kind::TFomm) {
    if (policy.fan_out < 1) throw std::invalid_argument("fan-out k must be >= 1");
    validate(policy.temporal);
  }
  validate_visit_streams(visits);
  for (const auto& [user, stream] : visits) {
    for (const auto& v : stream) {
      if (v.node_id < 0 || v.node_id >= grid.node_count()) {
        throw SimulationError("visit references a node outside the grid (user " + user + ")");
      }
    }
  }
  Simulator sim(visits, grid, policy, options);
  SimulationResult result = sim.run();
  result.presence = visits;
  return result;
}

void write_ledger_csv(std::ostream& out, std::span<const HoldingInterval> history,
                      HoldingInterval::Kind kind) {
  out << "user,node,from_unix,to_unix\n";
  for (const auto& h : history) {
    if (h.kind != kind) continue;
    out << h.user_id << ',' << h.node_id << ',' << h.from << ',' << h.to << '\n';
  }
}

}  // namespace fogrep
