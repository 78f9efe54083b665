#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "fogrep/grid.hpp"
#include "fogrep/hwes.hpp"
#include "fogrep/kernels.hpp"

using namespace fogrep;
using namespace fogrep::kernels;

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

struct ScalarScope {
  ScalarScope() { set_preference(Preference::Scalar); }
  ~ScalarScope() { set_preference(Preference::Auto); }
};

}  // namespace

TEST_CASE("dispatch") {
  CHECK(scalar_kernels().name == "scalar");
  {
    ScalarScope s;
    CHECK(active_kernels().name == "scalar");
  }
  if (const KernelTable* wide = avx2_kernels()) {
    CHECK(active_kernels().name == wide->name);
  } else {
    CHECK(active_kernels().name == "scalar");
  }
}

TEST_CASE("haversine terms: AVX2 matches scalar bit for bit") {
  const KernelTable* wide = avx2_kernels();
  if (!wide) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 63u, 64u, 65u, 257u}) {
    std::vector<double> sl(n), cl(n), so(n), co(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double la = angle(rng), lo = angle(rng);
      sl[i] = std::sin(la);
      cl[i] = std::cos(la);
      so[i] = std::sin(lo);
      co[i] = std::cos(lo);
    }
    const TrigTable table{sl, cl, so, co};
    for (int rep = 0; rep < 20; ++rep) {
      const double la = angle(rng), lo = angle(rng);
      const PointTrig p{std::sin(la), std::cos(la), std::sin(lo), std::cos(lo)};
      std::vector<double> a(n, -1.0), b(n, -2.0);
      scalar_kernels().haversine_terms(p, table, a);
      wide->haversine_terms(p, table, b);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(a[i], b[i]));
    }
  }
}

TEST_CASE("smoothing SSE: AVX2 matches scalar bit for bit") {
  const KernelTable* wide = avx2_kernels();
  if (!wide) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> y(0.0, 5000.0), unit(0.0, 1.0);
  for (std::size_t m : {1u, 2u, 3u, 7u, 12u}) {
    for (std::size_t len : {2 * m, 2 * m + 1, 5 * m + 3, 40 * m}) {
      std::vector<double> series(len);
      for (auto& v : series) v = y(rng);
      std::vector<double> seasonals(m);
      for (auto& s : seasonals) s = y(rng) - 2500.0;
      const SmoothingStart start{y(rng), y(rng) - 2500.0, seasonals, m};
      for (std::size_t np : {1u, 3u, 4u, 5u, 25u, 125u}) {
        std::vector<SmoothingParams> params(np);
        for (auto& p : params) p = {unit(rng), unit(rng), m == 1 ? 0.0 : unit(rng)};
        std::vector<double> a(np), b(np);
        scalar_kernels().smoothing_sse(series, start, params, a);
        wide->smoothing_sse(series, start, params, b);
        for (std::size_t i = 0; i < np; ++i) REQUIRE(same_bits(a[i], b[i]));
      }
    }
  }
}

TEST_CASE("library results do not depend on the selected kernels") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> y(10.0, 9000.0);
  std::vector<std::vector<double>> series(30);
  for (auto& s : series) {
    s.resize(14 + rng() % 60);
    for (auto& v : s) v = y(rng);
  }
  const GridNetwork grid(8, 8);
  std::uniform_real_distribution<double> lat(39.7, 40.1), lon(116.1, 116.7);
  std::vector<std::pair<double, double>> points(2000);
  for (auto& p : points) p = {lat(rng), lon(rng)};

  auto snapshot = [&] {
    std::vector<double> out;
    for (const auto& s : series) {
      const auto f = hwes::Forecaster::build(s, 7);
      for (std::size_t h = 1; h <= 5; ++h) out.push_back(f->at(h));
    }
    for (const auto& [la, lo] : points) out.push_back(grid.closest_node(la, lo));
    return out;
  };
  const auto automatic = snapshot();
  std::vector<double> scalar;
  {
    ScalarScope s;
    scalar = snapshot();
  }
  REQUIRE(automatic.size() == scalar.size());
  CHECK(std::memcmp(automatic.data(), scalar.data(), automatic.size() * sizeof(double)) == 0);
}
