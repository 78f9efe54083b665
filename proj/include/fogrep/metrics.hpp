#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogrep/simulation.hpp"

namespace fogrep {

struct UserMetrics {
  std::string user_id;
  Seconds presence_seconds = 0;
  Seconds available_seconds = 0;     // complete replica at the current node
  Seconds excess_node_seconds = 0;   // replica or download at any other node
  std::optional<double> availability_pct;  // nullopt for zero presence
  std::optional<double> excess_pct;
};

/// Per-user figures plus two aggregates: presence-weighted (the headline
/// numbers) and the plain mean over users with non-zero presence.
struct MetricsResult {
  std::vector<UserMetrics> users;
  Seconds presence_seconds = 0;
  Seconds available_seconds = 0;
  Seconds excess_node_seconds = 0;
  double availability_pct = 0.0;
  double excess_pct = 0.0;
  double availability_pct_unweighted = 0.0;
  double excess_pct_unweighted = 0.0;
};

/// Integrates ledger intervals over presence (the users' visits), in whole
/// seconds. Only time inside a visit counts.
MetricsResult compute_metrics(std::span<const HoldingInterval> history, const VisitStreams& presence);

double availability(std::span<const HoldingInterval> history, const VisitStreams& presence);
double excess_data(std::span<const HoldingInterval> history, const VisitStreams& presence);

struct ResultRow {
  std::string policy;
  std::string variant;
  double availability_pct = 0.0;
  double excess_pct = 0.0;
};

/// Indices of the rows no other row dominates (at least as available and at
/// most as much excess, strictly better in one), ordered by availability
/// ascending; equal availability keeps input order.
std::vector<std::size_t> pareto_front(std::span<const ResultRow> rows);

/// `policy,variant,availability_pct,excess_pct`
void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);

/// Throws std::runtime_error on a header or field mismatch, or an empty file.
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Merged table with a trailing `pareto` 0/1 column.
void write_comparison_csv(std::ostream& out, std::span<const ResultRow> rows,
                          std::span<const std::size_t> front);

/// Same schema as the results table, front members only, by availability.
void write_pareto_csv(std::ostream& out, std::span<const ResultRow> rows,
                      std::span<const std::size_t> front);

}  // namespace fogrep
