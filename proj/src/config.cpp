#include "fogrep/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fogrep {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string str(const std::string& key) const {
    return trim(tree_.get<std::string>(pt::ptree::path_type(key, '\0')));
  }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    const std::string text = str(key);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError(where(key) + ": expected a number, got '" + text + "'");
    }
    return value;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where(key) + ": expected true/false, got '" + v + "'");
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void reject_unknown(std::initializer_list<std::string_view> known) const {
    for (const auto& [key, _] : tree_) {
      bool ok = false;
      for (auto k : known) ok = ok || key == k;
      if (!ok) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

TdSet parse_td_set(const Section& s, const std::string& key) {
  const std::string v = s.str(key);
  if (v == "hours") return TdSet::Hours;
  if (v == "days_of_week") return TdSet::DaysOfWeek;
  if (v == "months") return TdSet::Months;
  throw ConfigError(s.where(key) + ": expected hours|days_of_week|months, got '" + v + "'");
}

PolicySpec parse_policy(const Section& s, const std::string& label) {
  PolicySpec spec;
  spec.label = label;
  if (!s.has("kind")) throw ConfigError(s.where("kind") + ": missing");
  const std::string kind = s.str("kind");
  if (kind == "keep_on_closest") {
    s.reject_unknown({"kind"});
    spec.policy = PolicyConfig::keep_on_closest();
    return spec;
  }
  if (kind == "always_on_all") {
    s.reject_unknown({"kind"});
    spec.policy = PolicyConfig::always_on_all();
    return spec;
  }
  if (kind != "tfomm") {
    throw ConfigError(s.where("kind") + ": expected keep_on_closest|always_on_all|tfomm, got '" +
                      kind + "'");
  }
  s.reject_unknown({"kind", "temporal", "fan_out", "percentile", "sweep", "td_set", "statistic",
                    "split", "season_length"});

  TemporalConfig t;
  const std::string temporal = s.has("temporal") ? s.str("temporal") : "mean";
  if (temporal == "mean") {
    t.kind = TemporalConfig::Kind::Mean;
  } else if (temporal == "pctl") {
    t.kind = TemporalConfig::Kind::Percentile;
    t.percentile = s.number<double>("percentile", 50.0);
    if (s.has("sweep")) {
      try {
        spec.sweep = parse_sweep(s.str("sweep"));
      } catch (const ConfigError& e) {
        throw ConfigError(s.where("sweep") + ": " + e.what());
      }
      for (double k : spec.sweep) {
        if (!(k >= 0.0 && k <= 100.0)) throw ConfigError(s.where("sweep") + ": values must lie in [0, 100]");
      }
    }
    if (!(t.percentile >= 0.0 && t.percentile <= 100.0)) {
      throw ConfigError(s.where("percentile") + ": must lie in [0, 100]");
    }
  } else if (temporal == "td") {
    t.kind = TemporalConfig::Kind::Discretized;
    t.td_set = s.has("td_set") ? parse_td_set(s, "td_set") : TdSet::Hours;
    const std::string stat = s.has("statistic") ? s.str("statistic") : "mean";
    if (stat == "mean") {
      t.statistic = Statistic::Mean;
    } else if (stat == "median") {
      t.statistic = Statistic::Median;
    } else {
      throw ConfigError(s.where("statistic") + ": expected mean|median, got '" + stat + "'");
    }
  } else if (temporal == "hwes") {
    t.kind = TemporalConfig::Kind::Hwes;
    const std::string split = s.has("split") ? s.str("split") : "user";
    if (split == "user") {
      t.split = HwesSplit::User;
    } else if (split == "node") {
      t.split = HwesSplit::Node;
    } else if (split == "discretization") {
      t.split = HwesSplit::Discretization;
    } else {
      throw ConfigError(s.where("split") + ": expected user|node|discretization, got '" + split + "'");
    }
    t.season_length = s.number<std::size_t>("season_length", hwes::kDefaultSeasonLength);
    if (t.season_length < 2) throw ConfigError(s.where("season_length") + ": must be >= 2");
  } else {
    throw ConfigError(s.where("temporal") + ": expected mean|pctl|td|hwes, got '" + temporal + "'");
  }

  const auto fan_out = s.number<long long>("fan_out", 1);
  if (fan_out < 1) throw ConfigError(s.where("fan_out") + ": must be >= 1");
  spec.policy = PolicyConfig::tfomm(t, static_cast<std::size_t>(fan_out));
  return spec;
}

}  // namespace

std::set<std::string> parse_user_list(const std::string& text) {
  std::set<std::string> users;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) users.insert(item);
  }
  return users;
}

std::vector<double> parse_sweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) {
    item = trim(item);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("sweep must look like start:stop:step, got '" + text + "'");
    }
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ConfigError("sweep must look like start:stop:step with step > 0, got '" + text + "'");
  }
  std::vector<double> values;
  // Integer stepping avoids accumulating float error across the range.
  const auto steps = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long long i = 0; i <= steps; ++i) values.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return values;
}

std::vector<PolicyConfig> RunConfig::expanded_policies() const {
  std::vector<PolicyConfig> out;
  for (const auto& spec : policies) {
    if (spec.sweep.empty()) {
      out.push_back(spec.policy);
      continue;
    }
    for (double k : spec.sweep) {
      PolicyConfig p = spec.policy;
      p.temporal.percentile = k;
      out.push_back(p);
    }
  }
  return out;
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  RunConfig cfg;
  cfg.output_dir = base_dir / "out";
  for (const auto& [name, body] : tree) {
    const Section s(body, name);
    if (name == "input") {
      s.reject_unknown({"dataset_root", "trajectories", "users", "sample_users", "seed", "session_gap"});
      if (s.has("dataset_root")) cfg.dataset_root = resolve(base_dir, s.str("dataset_root"));
      if (s.has("trajectories")) cfg.trajectories = resolve(base_dir, s.str("trajectories"));
      if (s.has("users")) cfg.users = parse_user_list(s.str("users"));
      cfg.sample_users = s.number<std::size_t>("sample_users", 0);
      cfg.seed = s.number<std::uint64_t>("seed", 0);
      cfg.session_gap = s.number<Seconds>("session_gap", kDefaultSessionGap);
    } else if (name == "grid") {
      s.reject_unknown({"rows", "cols", "lat_min", "lat_max", "lon_min", "lon_max",
                        "transfer_time", "buffer"});
      cfg.rows = s.number<int>("rows", cfg.rows);
      cfg.cols = s.number<int>("cols", cfg.cols);
      cfg.bounds.lat_min = s.number<double>("lat_min", cfg.bounds.lat_min);
      cfg.bounds.lat_max = s.number<double>("lat_max", cfg.bounds.lat_max);
      cfg.bounds.lon_min = s.number<double>("lon_min", cfg.bounds.lon_min);
      cfg.bounds.lon_max = s.number<double>("lon_max", cfg.bounds.lon_max);
      cfg.transfer_time = s.number<Seconds>("transfer_time", cfg.transfer_time);
      cfg.buffer = s.number<Seconds>("buffer", cfg.buffer);
    } else if (name == "output") {
      s.reject_unknown({"directory", "export_series"});
      if (s.has("directory")) cfg.output_dir = resolve(base_dir, s.str("directory"));
      cfg.export_series = s.boolean("export_series", cfg.export_series);
    } else if (name.rfind("policy.", 0) == 0 && name.size() > 7) {
      cfg.policies.push_back(parse_policy(s, name.substr(7)));
    } else {
      throw ConfigError("[" + name + "]: unknown section");
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (cfg.dataset_root.has_value() == cfg.trajectories.has_value()) {
    throw ConfigError("[input]: set exactly one of dataset_root or trajectories");
  }
  if (cfg.dataset_root && !fs::is_directory(*cfg.dataset_root)) {
    throw ConfigError("[input] dataset_root: no such directory: " + cfg.dataset_root->string());
  }
  if (cfg.trajectories && !fs::is_regular_file(*cfg.trajectories)) {
    throw ConfigError("[input] trajectories: no such file: " + cfg.trajectories->string());
  }
  if (cfg.session_gap <= 0) throw ConfigError("[input] session_gap: must be > 0");
  if (cfg.policies.empty()) throw ConfigError("config lists no [policy.<label>] section");
  try {
    (void)cfg.grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[grid]: ") + e.what());
  }
}

}  // namespace fogrep
