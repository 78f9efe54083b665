#include <doctest.h>

#include "fogrep/config.hpp"
#include "support.hpp"

using namespace fogrep;

namespace {

std::filesystem::path base() {
  static const auto dir = [] {
    auto d = testing::fresh_dir("config");
    std::filesystem::create_directories(d / "data");
    return d;
  }();
  return dir;
}

RunConfig parse(const std::string& body) {
  return parse_config("[input]\ndataset_root = data\n" + body, base());
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, base());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse("[policy.k]\nkind = keep_on_closest\n");
  CHECK(c.dataset_root == base() / "data");
  CHECK(c.session_gap == 600);
  CHECK(c.rows == 8);
  CHECK(c.cols == 8);
  CHECK(c.bounds == GeoBounds{});
  CHECK(c.transfer_time == 300);
  CHECK(c.buffer == 0);
  CHECK(c.output_dir == base() / "out");
  CHECK(c.export_series);
  CHECK(c.sample_users == 0);
  CHECK_FALSE(c.users);
  REQUIRE(c.policies.size() == 1);
  CHECK(c.policies[0].label == "k");
}

TEST_CASE("full file") {
  const auto c = parse(
      "users = 003, 001,,002\nsample_users = 2\nseed = 9\nsession_gap = 900\n"
      "[grid]\nrows = 4\ncols = 5\ntransfer_time = 120\nbuffer = 30\nlat_min = 39\nlat_max = 41\n"
      "[output]\ndirectory = /tmp/x\nexport_series = false\n"
      "[policy.a]\nkind = tfomm\n"
      "[policy.b]\nkind = tfomm\ntemporal = pctl\nsweep = 0:100:10\nfan_out = 2\n"
      "[policy.c]\nkind = tfomm\ntemporal = td\ntd_set = months\nstatistic = median\n"
      "[policy.d]\nkind = tfomm\ntemporal = hwes\nsplit = node\nseason_length = 5\n"
      "[policy.e]\nkind = always_on_all\n");
  CHECK(*c.users == std::set<std::string>{"001", "002", "003"});
  CHECK(c.sample_users == 2);
  CHECK(c.seed == 9);
  CHECK(c.session_gap == 900);
  CHECK(c.grid().rows() == 4);
  CHECK(c.grid().transfer_time() == 120);
  CHECK(c.grid().buffer() == 30);
  CHECK(c.bounds.lat_min == 39);
  CHECK(c.output_dir == "/tmp/x");
  CHECK_FALSE(c.export_series);
  REQUIRE(c.policies.size() == 5);
  CHECK(c.policies[0].policy.variant() == "mean");
  CHECK(c.policies[1].sweep.size() == 11);
  CHECK(c.policies[1].policy.fan_out == 2);
  CHECK(c.policies[2].policy.temporal.td_set == TdSet::Months);
  CHECK(c.policies[3].policy.temporal.split == HwesSplit::Node);
  CHECK(c.policies[3].policy.temporal.season_length == 5);

  const auto all = c.expanded_policies();
  CHECK(all.size() == 4 + 11);
  CHECK(all[1].temporal.percentile == 0.0);
  CHECK(all[11].temporal.percentile == 100.0);
}

TEST_CASE("sweep and user list parsing") {
  const auto s = parse_sweep("0:100:10");
  REQUIRE(s.size() == 11);
  for (int i = 0; i <= 10; ++i) CHECK(s[i] == 10.0 * i);
  CHECK(parse_sweep("0:1:0.1").size() == 11);
  CHECK(parse_sweep("42") == std::vector<double>{42});
  CHECK_THROWS_AS(parse_sweep("0:10:0"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("10:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("0:10"), ConfigError);
  CHECK(parse_user_list(" a , b,, ") == std::set<std::string>{"a", "b"});
}

TEST_CASE("errors name the section and key") {
  const std::string in = "[input]\ndataset_root = data\n";
  const std::string pol = "[policy.p]\nkind = tfomm\n";
  CHECK(error_of(in + pol + "[grid]\nrowz = 3\n") == "[grid] rowz: unknown key");
  CHECK(error_of(in + pol + "[extra]\na = 1\n") == "[extra]: unknown section");
  CHECK(error_of(in + pol + "[grid]\nrows = many\n") == "[grid] rows: expected a number, got 'many'");
  CHECK(error_of(in + pol + "[output]\nexport_series = maybe\n") ==
        "[output] export_series: expected true/false, got 'maybe'");
  CHECK(error_of(in + "[policy.p]\ntemporal = mean\n") == "[policy.p] kind: missing");
  CHECK(error_of(in + "[policy.p]\nkind = tfomm\ntemporal = lstm\n") ==
        "[policy.p] temporal: expected mean|pctl|td|hwes, got 'lstm'");
  CHECK(error_of(in + "[policy.p]\nkind = tfomm\nfan_out = 0\n") == "[policy.p] fan_out: must be >= 1");
  CHECK(error_of(in + "[policy.p]\nkind = tfomm\ntemporal = pctl\npercentile = 101\n") ==
        "[policy.p] percentile: must lie in [0, 100]");
  CHECK(error_of(in + "[policy.p]\nkind = keep_on_closest\nfan_out = 2\n") ==
        "[policy.p] fan_out: unknown key");
  CHECK(error_of(in + "[policy.p]\nkind = tfomm\ntemporal = hwes\nseason_length = 1\n") ==
        "[policy.p] season_length: must be >= 2");
  CHECK(error_of(in) == "config lists no [policy.<label>] section");
  CHECK(error_of(pol) == "[input]: set exactly one of dataset_root or trajectories");
  CHECK(error_of(in + pol + "[grid]\nrows = 0\n").rfind("[grid]: ", 0) == 0);
  CHECK(error_of("[input]\ndataset_root = data\nsession_gap = 0\n" + pol) == "[input] session_gap: must be > 0");
  CHECK(error_of("[input]\ndataset_root = nowhere\n" + pol) ==
        "[input] dataset_root: no such directory: " + (base() / "nowhere").string());
  CHECK(error_of("[input\n").rfind("config syntax error", 0) == 0);
}

TEST_CASE("load_config resolves paths against the file") {
  const auto dir = testing::fresh_dir("config_load");
  std::filesystem::create_directories(dir / "traces");
  testing::write_text(dir / "run.ini", "[input]\ndataset_root = traces\n[policy.k]\nkind = keep_on_closest\n");
  CHECK(load_config(dir / "run.ini").dataset_root == dir / "traces");
  CHECK_THROWS_WITH_AS(load_config(dir / "missing.ini"),
                       ("cannot read config file: " + (dir / "missing.ini").string()).c_str(), ConfigError);
}

TEST_CASE("bundled config parses") {
  const auto c = load_config(std::filesystem::path(FOGREP_CONFIG_DIR) / "geolife10.ini");
  CHECK(c.expanded_policies().size() == 3 + 11 + 6 + 3);
}
