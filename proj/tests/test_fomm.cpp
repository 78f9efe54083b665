#include <doctest.h>

#include <random>
#include <sstream>

#include "fogrep/fomm.hpp"
#include "support.hpp"

using namespace fogrep;
using testing::visit;

namespace {

constexpr Timestamp kTue14 = 1224597600;  // 2008-10-21 14:00:00 UTC, a Tuesday

double prob(const Distribution& d, NodeId n) {
  for (const auto& p : d) {
    if (p.node == n) return p.probability;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("single transition") {
  FommModel m("u");
  m.observe_transition(visit("u", 1, kTue14, kTue14 + 60), 2);
  const auto d = m.sub_model(0).distribution(0, 1);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Prediction{2, 1.0});
  const auto p = m.predict_next(visit("u", 1, kTue14 + 3600 * 5, kTue14 + 3600 * 6), 3);
  REQUIRE(p.size() == 1);
  CHECK(p[0].node == 2);
  CHECK(p[0].probability == doctest::Approx(1.0));
}

TEST_CASE("count ratios") {
  FommModel m("u");
  m.observe_transition(visit("u", 1, 0, 10), 2);
  m.observe_transition(visit("u", 1, 100, 110), 2);
  m.observe_transition(visit("u", 1, 200, 210), 3);
  const auto d = m.sub_model(0).distribution(0, 1);
  CHECK(prob(d, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(prob(d, 3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("binning of a Tuesday 14:00 transition") {
  FommModel m("u");
  m.observe_transition(visit("u", 4, kTue14, kTue14 + 60), 5);
  CHECK(m.sub_model(1).discretizer() == Discretizer::HourOfDay);
  CHECK(m.sub_model(1).row(14, 4) != nullptr);
  CHECK(m.sub_model(1).row(13, 4) == nullptr);
  CHECK(m.sub_model(2).row(2, 4) != nullptr);
  CHECK(m.sub_model(2).rows().size() == 1);
  CHECK(m.sub_model(3).row(9, 4) != nullptr);
}

TEST_CASE("cold start predicts nothing") {
  FommModel m("u");
  CHECK(m.predict_next(visit("u", 1, 0, 10), 1).empty());
  m.observe_transition(visit("u", 1, 0, 10), 2);
  CHECK(m.predict_next(visit("u", 9, 0, 10), 1).empty());
}

TEST_CASE("hand fusion with equal weights and a tie") {
  const Distribution p1 = {{2, 1.0}};
  const Distribution p2 = {{3, 1.0}};
  const Distribution* rows[] = {&p2, nullptr, &p1, nullptr};
  const double w[] = {0.25, 0.25, 0.25, 0.25};
  const auto fused = fuse_distributions(rows, w);
  REQUIRE(fused.size() == 2);
  CHECK(fused[0] == Prediction{2, 0.5});
  CHECK(fused[1] == Prediction{3, 0.5});
}

TEST_CASE("fallback to the global row keeps predictions available") {
  FommModel m("u");
  m.observe_transition(visit("u", 1, kTue14, kTue14 + 60), 2);
  // Different hour, weekday and month: only the global row knows node 1.
  const Timestamp other = kTue14 + 86400 * 45 + 3600 * 3;
  const auto p = m.predict_next(visit("u", 1, other, other + 60), 1);
  REQUIRE(p.size() == 1);
  CHECK(p[0].node == 2);
  CHECK(p[0].probability == doctest::Approx(1.0));
}

TEST_CASE("accuracy and weights") {
  FommModel m("u");
  for (double a : m.sub_model_accuracy()) CHECK(a == 0.0);
  for (double w : m.weights()) CHECK(w == doctest::Approx(0.25));

  // First A->B is a miss (nothing known), the next three hit.
  for (int i = 0; i < 4; ++i) m.observe_transition(visit("u", 1, i * 100, i * 100 + 10), 2);
  for (double a : m.sub_model_accuracy()) CHECK(a == doctest::Approx(0.75));
  for (double w : m.weights()) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("Laplace weights differ once sub-models disagree") {
  FommModel m("u");
  // Same origin at two hours with different successors: the hourly model
  // learns the split, the global one keeps guessing the majority.
  const Timestamp h8 = kTue14 - 6 * 3600, h9 = kTue14 - 5 * 3600;
  for (int day = 0; day < 6; ++day) {
    m.observe_transition(visit("u", 1, h8 + day * 86400, h8 + day * 86400 + 60), 2);
    m.observe_transition(visit("u", 1, h9 + day * 86400, h9 + day * 86400 + 60), 3);
  }
  const auto acc = m.sub_model_accuracy();
  // Hand count. Global: row {2:k,3:k} before each 2 (tie -> 2, hit except the
  // first, which has no row) and {2:k+1,3:k} before each 3 (miss): 5 hits of 12.
  CHECK(acc[0] == doctest::Approx(5.0 / 12.0));
  // Hourly: first visit per hour falls back to global; 8:00 first is a miss
  // (no data), 9:00 first falls back to {2:1} and misses; the rest hit.
  CHECK(acc[1] == doctest::Approx(10.0 / 12.0));
  const double g = (5.0 + 1) / (12 + 2), h = (10.0 + 1) / (12 + 2);
  const auto w = m.weights();
  const double sum = w[0] + w[1] + w[2] + w[3];
  CHECK(sum == doctest::Approx(1.0));
  CHECK(w[1] / w[0] == doctest::Approx(h / g));
}

TEST_CASE("deterministic loop converges to perfect accuracy") {
  FommModel m("u");
  const int n = 200;
  for (int i = 0; i < n; ++i) m.observe_transition(visit("u", i % 2, i * 60, i * 60 + 60), (i + 1) % 2);
  // Only the first A->B and the first B->A are misses.
  CHECK(m.sub_model_accuracy()[0] == doctest::Approx((n - 2.0) / n));
}

TEST_CASE("user mismatch is rejected") {
  FommModel m("u");
  CHECK_THROWS_AS(m.observe_transition(visit("v", 1, 0, 10), 2), std::invalid_argument);
}

TEST_CASE("model dump") {
  FommModel m("u");
  m.observe_transition(visit("u", 4, kTue14, kTue14 + 60), 5);
  std::ostringstream out;
  m.dump(out);
  CHECK(out.str() ==
        "# global\n0,4,5,1\n# hour_of_day\n14,4,5,1\n# day_of_week\n2,4,5,1\n# month\n9,4,5,1\n");
}

TEST_CASE("properties over random streams") {
  std::mt19937_64 rng(42);
  FommModel m("u");
  NodeId current = 0;
  Timestamp t = 1200000000;
  for (int i = 0; i < 3000; ++i) {
    // Node ids from a growing, unbounded set.
    const NodeId next = static_cast<NodeId>(rng() % (5 + i / 50));
    const auto before = m.sub_model(0).rows();
    const NodeVisit v = visit("u", current, t, t + 600);
    CHECK_NOTHROW(m.observe_transition(v, next));

    // Online expansion only touches the updated row.
    const auto& after = m.sub_model(0).rows();
    for (const auto& [key, row] : before) {
      if (key == std::make_pair(0, current)) continue;
      CHECK(after.at(key).counts == row.counts);
    }

    // Weights form a probability vector.
    double wsum = 0.0;
    for (double w : m.weights()) {
      CHECK(w >= 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));

    // Fused probabilities stay inside the contributing sub-models' range.
    if (i % 25 == 0) {
      const auto fused = m.predict_next(v, 1000);
      double fsum = 0.0;
      for (const auto& p : fused) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t s = 0; s < FommModel::kSubModels; ++s) {
          const auto& sub = m.sub_model(s);
          auto d = sub.distribution(bin_of(sub.discretizer(), v.arrival), v.node_id);
          if (d.empty()) d = m.sub_model(0).distribution(0, v.node_id);
          if (d.empty()) continue;
          lo = std::min(lo, prob(d, p.node));
          hi = std::max(hi, prob(d, p.node));
        }
        CHECK(p.probability >= lo - 1e-12);
        CHECK(p.probability <= hi + 1e-12);
        fsum += p.probability;
      }
      CHECK(fsum == doctest::Approx(1.0));
    }
    current = next;
    t += 600 + static_cast<Timestamp>(rng() % 7200);
  }

  // Row stochasticity in every sub-model.
  for (std::size_t s = 0; s < FommModel::kSubModels; ++s) {
    for (const auto& [key, row] : m.sub_model(s).rows()) {
      double sum = 0.0;
      for (const auto& p : m.sub_model(s).distribution(key.first, key.second)) sum += p.probability;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("identical observation sequences give identical predictions") {
  auto build = [] {
    FommModel m("u");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
      m.observe_transition(visit("u", static_cast<NodeId>(rng() % 9), i * 977, i * 977 + 60),
                           static_cast<NodeId>(rng() % 9));
    }
    return m;
  };
  const FommModel a = build(), b = build();
  for (NodeId n = 0; n < 9; ++n) {
    CHECK(a.predict_next(visit("u", n, 5000, 5060), 4) == b.predict_next(visit("u", n, 5000, 5060), 4));
  }
}
