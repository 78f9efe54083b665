// fogrep: ingest GeoLife traces, simulate replication policies, compare
// result tables.
//
// Exit codes: 0 success, 2 usage/config/input error, 1 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogrep/config.hpp"
#include "fogrep/experiment.hpp"
#include "fogrep/metrics.hpp"
#include "fogrep/trajectory.hpp"

namespace fs = std::filesystem;

namespace {

// Problems the user can fix by changing the command line or inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out;
  std::string users;
  std::optional<fogrep::Seconds> gap;
  bool verbose = false;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config, "experiment config (.ini)");
  cmd.add_option("--out", c.out, "output path");
  cmd.add_option("--users", c.users, "comma-separated user ids");
  cmd.add_option("--gap", c.gap, "session gap threshold in seconds")->check(CLI::PositiveNumber);
  cmd.add_flag("--verbose,-v", c.verbose, "progress output on stderr");
}

void apply_overrides(fogrep::RunConfig& cfg, const Common& c) {
  if (!c.users.empty()) cfg.users = fogrep::parse_user_list(c.users);
  if (c.gap) cfg.session_gap = *c.gap;
  if (!c.out.empty()) cfg.output_dir = c.out;
}

int cmd_ingest(const Common& c, const std::string& root) {
  fogrep::RunConfig cfg;
  if (!c.config.empty()) {
    cfg = fogrep::load_config(c.config);
  }
  if (!root.empty()) {
    cfg.dataset_root = root;
    cfg.trajectories.reset();
  }
  if (!cfg.dataset_root) throw UsageError("ingest needs --root or a config with [input] dataset_root");
  if (c.out.empty()) throw UsageError("ingest needs --out <file>");
  if (!c.users.empty()) cfg.users = fogrep::parse_user_list(c.users);
  if (c.gap) cfg.session_gap = *c.gap;

  fogrep::IngestStats stats;
  const fogrep::UserPoints points = fogrep::load_user_points(*cfg.dataset_root, cfg.users, &stats);
  if (cfg.users) {
    for (const auto& u : *cfg.users) {
      if (!points.contains(u)) std::cerr << "warning: no data for user " << u << '\n';
    }
  }

  const fs::path out_path(c.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + out_path.string());
  fogrep::write_normalized(out, points);

  std::cout << "user\tpoints\tsessions\n";
  for (const auto& [user, pts] : points) {
    std::cout << user << '\t' << pts.size() << '\t'
              << fogrep::split_sessions(pts, cfg.session_gap).size() << '\n';
  }
  if (c.verbose) {
    std::cerr << stats.files << " files, " << stats.points << " points, " << stats.warnings
              << " malformed records skipped, " << stats.duplicates << " duplicate timestamps dropped\n";
  }
  return 0;
}

int cmd_simulate(const Common& c) {
  if (c.config.empty()) throw UsageError("simulate needs --config <file>");
  fogrep::RunConfig cfg = fogrep::load_config(c.config);
  apply_overrides(cfg, c);
  fogrep::validate(cfg);
  const auto report = fogrep::run_experiment(cfg, c.verbose ? &std::cerr : nullptr);
  std::ostringstream table;
  fogrep::write_results_csv(table, report.rows);
  std::cout << table.str();
  if (c.verbose) std::cerr << "manifest sha256 " << report.manifest_hash << '\n';
  return 0;
}

int cmd_compare(const Common& c, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw UsageError("compare needs at least one results CSV");
  std::vector<fogrep::ResultRow> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    try {
      auto part = fogrep::read_results_csv(in);
      rows.insert(rows.end(), part.begin(), part.end());
    } catch (const std::runtime_error& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  const auto front = fogrep::pareto_front(rows);

  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  std::ofstream comparison(dir / "comparison.csv", std::ios::binary);
  std::ofstream pareto(dir / "pareto.csv", std::ios::binary);
  if (!comparison || !pareto) throw UsageError("cannot write into " + dir.string());
  fogrep::write_comparison_csv(comparison, rows, front);
  fogrep::write_pareto_csv(pareto, rows, front);
  fogrep::write_comparison_csv(std::cout, rows, front);
  if (c.verbose) std::cerr << rows.size() << " rows, " << front.size() << " on the Pareto front\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive data replication simulator for fog networks"};
  app.require_subcommand(1);

  Common ingest_opts, simulate_opts, compare_opts;
  std::string root;
  std::vector<std::string> inputs;

  auto* ingest = app.add_subcommand("ingest", "parse GeoLife traces into a normalized TSV");
  add_common(*ingest, ingest_opts);
  ingest->add_option("--root", root, "GeoLife Data directory (holds <user>/Trajectory)");

  auto* simulate = app.add_subcommand("simulate", "run every configured policy variant");
  add_common(*simulate, simulate_opts);

  auto* compare = app.add_subcommand("compare", "merge results CSVs and mark the Pareto front");
  add_common(*compare, compare_opts);
  compare->add_option("results", inputs, "results CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_opts, root);
    if (*simulate) return cmd_simulate(simulate_opts);
    return cmd_compare(compare_opts, inputs);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fogrep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fogrep::IngestError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
