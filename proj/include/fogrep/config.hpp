#pragma once

// Experiment configuration: one INI-style file with [input], [grid],
// [output] and one [policy.<label>] section per policy.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogrep/grid.hpp"
#include "fogrep/simulation.hpp"

namespace fogrep {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicySpec {
  std::string label;          // section suffix
  PolicyConfig policy;
  std::vector<double> sweep;  // percentile sweep values; empty = no sweep
};

struct RunConfig {
  std::optional<std::filesystem::path> dataset_root;  // GeoLife tree
  std::optional<std::filesystem::path> trajectories;  // normalized TSV
  std::optional<std::set<std::string>> users;
  std::size_t sample_users = 0;  // 0 = keep every user
  std::uint64_t seed = 0;        // only drives sample_users
  Seconds session_gap = kDefaultSessionGap;

  int rows = 8;
  int cols = 8;
  GeoBounds bounds;
  Seconds transfer_time = GridNetwork::kDefaultTransferTime;
  Seconds buffer = 0;

  std::filesystem::path output_dir = "out";
  bool export_series = true;

  std::vector<PolicySpec> policies;

  GridNetwork grid() const { return GridNetwork(rows, cols, bounds, transfer_time, buffer); }

  /// Every policy with sweeps unrolled, in file order.
  std::vector<PolicyConfig> expanded_policies() const;
};

/// Parses and validates; relative paths resolve against the config file's
/// directory. Throws ConfigError naming the offending section/key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Checks cross-field invariants and path existence.
void validate(const RunConfig& config);

/// "a,b,c" -> {a, b, c}; blanks are ignored.
std::set<std::string> parse_user_list(const std::string& text);

/// "0:100:10" -> {0, 10, ..., 100}; a single number is a one-element sweep.
std::vector<double> parse_sweep(const std::string& text);

}  // namespace fogrep
