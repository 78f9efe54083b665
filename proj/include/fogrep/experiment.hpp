#pragma once

// Ingest -> visits -> simulate every policy variant -> metrics, plus the
// run manifest that pins the whole pipeline.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogrep/config.hpp"
#include "fogrep/metrics.hpp"
#include "fogrep/simulation.hpp"
#include "fogrep/trajectory.hpp"

namespace fogrep {

struct PreparedInput {
  UserPoints points;
  VisitStreams visits;
  std::string input_hash;  // SHA-256 of the normalized trajectory bytes
  IngestStats stats;
};

/// Loads the configured trajectories, applies the user filter and the seeded
/// subsample, and converts sessions to visits on the configured grid.
PreparedInput prepare_input(const RunConfig& config);

/// Deterministic subsample of `count` ids (all when count == 0 or larger
/// than the pool), returned sorted.
std::vector<std::string> sample_user_ids(std::vector<std::string> pool, std::size_t count,
                                         std::uint64_t seed);

struct VariantRun {
  PolicyConfig policy;
  SimulationResult simulation;
  MetricsResult metrics;
};

/// Independent runs, executed concurrently; results come back in input
/// order and do not depend on scheduling.
std::vector<VariantRun> run_variants(const VisitStreams& visits, const GridNetwork& grid,
                                     std::span<const PolicyConfig> policies);

struct ExperimentReport {
  std::vector<ResultRow> rows;
  std::string manifest_hash;  // SHA-256 of manifest.json
};

/// Full `simulate` pipeline; writes every artifact under config.output_dir.
/// `log` (may be null) receives progress lines.
ExperimentReport run_experiment(const RunConfig& config, std::ostream* log);

std::string sha256_hex(std::string_view bytes);

/// Canonical JSON echo of every effective parameter.
std::string config_echo_json(const RunConfig& config);

}  // namespace fogrep
