#include "fogrep/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "fogrep/grid.hpp"
#include "fogrep/temporal.hpp"

namespace fogrep {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string temporal_kind_name(TemporalConfig::Kind k) {
  switch (k) {
    case TemporalConfig::Kind::Mean: return "mean";
    case TemporalConfig::Kind::Percentile: return "pctl";
    case TemporalConfig::Kind::Discretized: return "td";
    case TemporalConfig::Kind::Hwes: return "hwes";
  }
  return "?";
}

json policy_json(const PolicyConfig& p) {
  json j;
  j["kind"] = p.policy_name();
  if (p.kind != PolicyConfig::Kind::TFomm) return j;
  j["fan_out"] = p.fan_out;
  const TemporalConfig& t = p.temporal;
  j["temporal"] = temporal_kind_name(t.kind);
  switch (t.kind) {
    case TemporalConfig::Kind::Mean: break;
    case TemporalConfig::Kind::Percentile: j["percentile"] = t.percentile; break;
    case TemporalConfig::Kind::Discretized: {
      const char* sets[] = {"hours", "days_of_week", "months"};
      j["td_set"] = sets[static_cast<int>(t.td_set)];
      j["statistic"] = t.statistic == Statistic::Mean ? "mean" : "median";
      break;
    }
    case TemporalConfig::Kind::Hwes: {
      const char* splits[] = {"discretization", "node", "user"};
      j["split"] = splits[static_cast<int>(t.split)];
      j["season_length"] = t.season_length;
      break;
    }
  }
  return j;
}

std::string file_label(const PolicyConfig& p) {
  std::string v = p.variant();
  return v == "-" ? p.policy_name() : p.policy_name() + "_" + v;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

std::string format_pct(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::vector<std::string> sample_user_ids(std::vector<std::string> pool, std::size_t count,
                                         std::uint64_t seed) {
  std::sort(pool.begin(), pool.end());
  if (count == 0 || count >= pool.size()) return pool;
  // Fisher-Yates on raw engine output: std::uniform_int_distribution is not
  // specified bit-for-bit across standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

PreparedInput prepare_input(const RunConfig& config) {
  PreparedInput in;
  if (config.dataset_root) {
    in.points = load_user_points(*config.dataset_root, config.users, &in.stats);
  } else {
    UserPoints all = read_normalized_file(*config.trajectories);
    for (auto& [user, pts] : all) {
      if (config.users && !config.users->contains(user)) continue;
      in.stats.points += pts.size();
      in.points.emplace(user, std::move(pts));
    }
  }

  if (config.sample_users > 0) {
    std::vector<std::string> pool;
    for (const auto& [user, _] : in.points) pool.push_back(user);
    const auto keep = sample_user_ids(pool, config.sample_users, config.seed);
    UserPoints kept;
    for (const auto& id : keep) kept.emplace(id, std::move(in.points.at(id)));
    in.points = std::move(kept);
  }

  std::ostringstream normalized;
  write_normalized(normalized, in.points);
  in.input_hash = sha256_hex(normalized.str());

  const GridNetwork grid = config.grid();
  for (const auto& [user, pts] : in.points) {
    const auto sessions = split_sessions(pts, config.session_gap);
    auto visits = visits_from_sessions(grid, sessions);
    if (!visits.empty()) in.visits.emplace(user, std::move(visits));
  }
  return in;
}

std::vector<VariantRun> run_variants(const VisitStreams& visits, const GridNetwork& grid,
                                     std::span<const PolicyConfig> policies) {
  std::vector<VariantRun> runs(policies.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < policies.size();) {
      if (failed.load()) return;
      try {
        runs[i].policy = policies[i];
        runs[i].simulation = run_simulation(visits, grid, policies[i]);
        runs[i].metrics = compute_metrics(runs[i].simulation.history, visits);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, policies.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

std::string config_echo_json(const RunConfig& c) {
  json j;
  json input;
  // Paths are echoed by name only; the input hash pins the content.
  if (c.dataset_root) input["dataset_root"] = c.dataset_root->filename().generic_string();
  if (c.trajectories) input["trajectories"] = c.trajectories->filename().generic_string();
  input["users"] = c.users ? json(std::vector<std::string>(c.users->begin(), c.users->end()))
                           : json(nullptr);
  input["sample_users"] = c.sample_users;
  input["seed"] = c.seed;
  input["session_gap"] = c.session_gap;
  j["input"] = input;
  j["grid"] = {{"rows", c.rows},
               {"cols", c.cols},
               {"lat_min", c.bounds.lat_min},
               {"lat_max", c.bounds.lat_max},
               {"lon_min", c.bounds.lon_min},
               {"lon_max", c.bounds.lon_max},
               {"transfer_time", c.transfer_time},
               {"buffer", c.buffer}};
  j["output"] = {{"export_series", c.export_series}};
  json policies = json::array();
  for (const auto& spec : c.policies) {
    json p = policy_json(spec.policy);
    p["label"] = spec.label;
    if (!spec.sweep.empty()) {
      p.erase("percentile");
      p["sweep"] = spec.sweep;
    }
    policies.push_back(p);
  }
  j["policies"] = policies;
  return j.dump(2);
}

ExperimentReport run_experiment(const RunConfig& config, std::ostream* log) {
  const PreparedInput input = prepare_input(config);
  const GridNetwork grid = config.grid();
  const std::vector<PolicyConfig> policies = config.expanded_policies();
  if (log) {
    *log << "users: " << input.visits.size() << ", points: " << input.stats.points
         << ", variants: " << policies.size() << '\n';
  }

  const std::vector<VariantRun> runs = run_variants(input.visits, grid, policies);

  fs::create_directories(config.output_dir / "ledger");
  ExperimentReport report;
  std::ostringstream summary, per_user, sweep;
  summary << "policy,variant,availability_pct,excess_pct,availability_pct_unweighted,"
             "excess_pct_unweighted,presence_seconds\n";
  per_user << "policy,variant,user,presence_seconds,availability_pct,excess_pct\n";
  sweep << "percentile,fan_out,availability_pct,excess_pct\n";
  bool any_sweep = false;

  for (const auto& run : runs) {
    const auto& m = run.metrics;
    const std::string policy = run.policy.policy_name();
    const std::string variant = run.policy.variant();
    report.rows.push_back({policy, variant, m.availability_pct, m.excess_pct});
    summary << policy << ',' << variant << ',' << format_pct(m.availability_pct) << ','
            << format_pct(m.excess_pct) << ',' << format_pct(m.availability_pct_unweighted) << ','
            << format_pct(m.excess_pct_unweighted) << ',' << m.presence_seconds << '\n';
    for (const auto& u : m.users) {
      per_user << policy << ',' << variant << ',' << u.user_id << ',' << u.presence_seconds << ','
               << (u.availability_pct ? format_pct(*u.availability_pct) : "") << ','
               << (u.excess_pct ? format_pct(*u.excess_pct) : "") << '\n';
    }
    if (run.policy.kind == PolicyConfig::Kind::TFomm &&
        run.policy.temporal.kind == TemporalConfig::Kind::Percentile) {
      any_sweep = true;
      sweep << run.policy.temporal.percentile << ',' << run.policy.fan_out << ','
            << format_pct(m.availability_pct) << ',' << format_pct(m.excess_pct) << '\n';
    }
    if (log) {
      *log << policy << '/' << variant << ": availability " << format_pct(m.availability_pct)
           << "%, excess " << format_pct(m.excess_pct) << "%\n";
    }

    std::ostringstream replicas, transfers;
    write_ledger_csv(replicas, run.simulation.history, HoldingInterval::Kind::Replica);
    write_ledger_csv(transfers, run.simulation.history, HoldingInterval::Kind::Transfer);
    const std::string label = file_label(run.policy);
    write_file(config.output_dir / "ledger" / (label + ".replicas.csv"), replicas.str());
    write_file(config.output_dir / "ledger" / (label + ".transfers.csv"), transfers.str());
  }

  std::ostringstream results;
  write_results_csv(results, report.rows);
  write_file(config.output_dir / "results.csv", results.str());
  write_file(config.output_dir / "summary.csv", summary.str());
  write_file(config.output_dir / "per_user.csv", per_user.str());
  if (any_sweep) write_file(config.output_dir / "sweep_pctl.csv", sweep.str());

  std::ostringstream visits;
  for (const auto& [user, stream] : input.visits) write_visits(visits, stream);
  write_file(config.output_dir / "visits.tsv", visits.str());

  if (config.export_series) {
    std::size_t m = hwes::kDefaultSeasonLength;
    for (const auto& p : policies) {
      if (p.kind == PolicyConfig::Kind::TFomm && p.temporal.kind == TemporalConfig::Kind::Hwes) {
        m = p.temporal.season_length;
        break;
      }
    }
    fs::create_directories(config.output_dir / "series");
    for (const auto& [user, stream] : input.visits) {
      std::vector<double> durations;
      for (const auto& v : stream) {
        if (v.duration() > 0) durations.push_back(static_cast<double>(v.duration()));
      }
      std::ostringstream csv;
      write_series_forecast(csv, durations, m);
      write_file(config.output_dir / "series" / (user + "_user.csv"), csv.str());
    }
  }

  json manifest;
  manifest["config"] = json::parse(config_echo_json(config));
  manifest["input_sha256"] = input.input_hash;
  json users = json::array();
  for (const auto& [user, stream] : input.visits) {
    users.push_back({{"user", user}, {"points", input.points.at(user).size()}, {"visits", stream.size()}});
  }
  manifest["users"] = users;
  manifest["variants"] = policies.size();
  manifest["results_sha256"] = sha256_hex(results.str());
  const std::string manifest_text = manifest.dump(2) + "\n";
  write_file(config.output_dir / "manifest.json", manifest_text);
  report.manifest_hash = sha256_hex(manifest_text);
  return report;
}

}  // namespace fogrep
