#include "fogrep/temporal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace fogrep {

namespace {

constexpr double kMinForecast = 1.0;

int bin_count(TdSet set) {
  switch (set) {
    case TdSet::Hours: return 24;
    case TdSet::DaysOfWeek: return 7;
    case TdSet::Months: return 12;
  }
  return 1;
}

int bin_for(TdSet set, const CalendarBins& bins) {
  switch (set) {
    case TdSet::Hours: return bins.hour;
    case TdSet::DaysOfWeek: return bins.day_of_week;
    case TdSet::Months: return bins.month;
  }
  return 0;
}

std::string_view set_name(TdSet set) {
  switch (set) {
    case TdSet::Hours: return "hours";
    case TdSet::DaysOfWeek: return "days_of_week";
    case TdSet::Months: return "months";
  }
  return "?";
}

std::string_view split_name(HwesSplit split) {
  switch (split) {
    case HwesSplit::Discretization: return "discretization";
    case HwesSplit::Node: return "node";
    case HwesSplit::User: return "user";
  }
  return "?";
}

void insert_sorted(std::vector<double>& v, double x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

class MeanPredictor final : public TemporalPredictor {
 public:
  void record(const DurationSample& s) override {
    auto& acc = per_node_[s.node_id];
    acc.sum += s.duration;
    ++acc.count;
  }

  std::optional<double> predict(const PredictionContext& ctx) const override {
    auto it = per_node_.find(ctx.node_id);
    if (it == per_node_.end() || it->second.count == 0) return std::nullopt;
    return it->second.sum / static_cast<double>(it->second.count);
  }

 private:
  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<NodeId, Acc> per_node_;
};

class PercentilePredictor final : public TemporalPredictor {
 public:
  explicit PercentilePredictor(double k) : k_(k) {}

  void record(const DurationSample& s) override { insert_sorted(per_node_[s.node_id], s.duration); }

  std::optional<double> predict(const PredictionContext& ctx) const override {
    auto it = per_node_.find(ctx.node_id);
    if (it == per_node_.end() || it->second.empty()) return std::nullopt;
    return percentile(it->second, k_);
  }

 private:
  double k_;
  std::map<NodeId, std::vector<double>> per_node_;
};

class DiscretizedPredictor final : public TemporalPredictor {
 public:
  DiscretizedPredictor(TdSet set, Statistic stat) : set_(set), stat_(stat) {}

  void record(const DurationSample& s) override {
    auto& bins = per_node_[s.node_id];
    if (bins.empty()) bins.resize(static_cast<std::size_t>(bin_count(set_)));
    insert_sorted(bins[static_cast<std::size_t>(bin_for(set_, s.bins))], s.duration);
  }

  std::optional<double> predict(const PredictionContext& ctx) const override {
    auto it = per_node_.find(ctx.node_id);
    if (it == per_node_.end()) return std::nullopt;
    std::vector<std::optional<double>> stats(it->second.size());
    for (std::size_t b = 0; b < stats.size(); ++b) {
      const auto& v = it->second[b];
      if (v.empty()) continue;
      stats[b] = stat_ == Statistic::Mean ? mean_of(v) : percentile(v, 50.0);
    }
    return td_fallback(stats, bin_for(set_, calendar_bins(ctx.arrival)));
  }

 private:
  TdSet set_;
  Statistic stat_;
  std::map<NodeId, std::vector<std::vector<double>>> per_node_;
};

class HwesPredictor final : public TemporalPredictor {
 public:
  HwesPredictor(HwesSplit split, std::size_t m) : split_(split), m_(m) {}

  void record(const DurationSample& s) override {
    switch (split_) {
      case HwesSplit::User: append({-1, 0, 0}, s); break;
      case HwesSplit::Node: append({-1, 0, s.node_id}, s); break;
      case HwesSplit::Discretization:
        for (int d = 0; d < 3; ++d) append({d, bin_for(kSets[d], s.bins), s.node_id}, s);
        break;
    }
  }

  std::optional<double> predict(const PredictionContext& ctx) const override {
    switch (split_) {
      case HwesSplit::User: return predict_key({-1, 0, 0}, ctx.now);
      case HwesSplit::Node: return predict_key({-1, 0, ctx.node_id}, ctx.now);
      case HwesSplit::Discretization: {
        const CalendarBins bins = calendar_bins(ctx.arrival);
        double sum = 0.0;
        int n = 0;
        for (int d = 0; d < 3; ++d) {
          if (auto v = predict_key({d, bin_for(kSets[d], bins), ctx.node_id}, ctx.now)) {
            sum += *v;
            ++n;
          }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr std::array<TdSet, 3> kSets = {TdSet::Hours, TdSet::DaysOfWeek, TdSet::Months};

  // (discretizer or -1, bin, node)
  using Key = std::tuple<int, int, NodeId>;
  struct Series {
    std::vector<double> values;
    Timestamp last_end = 0;
  };

  void append(const Key& key, const DurationSample& s) {
    Series& series = series_[key];
    series.values.push_back(s.duration);
    series.last_end = std::max(series.last_end, s.end());
  }

  std::optional<double> predict_key(const Key& key, Timestamp now) const {
    auto it = series_.find(key);
    if (it == series_.end() || it->second.values.empty()) return std::nullopt;
    const double pause = static_cast<double>(std::max<Timestamp>(0, now - it->second.last_end));
    return hwes_predict_with_pause(it->second.values, pause, m_);
  }

  HwesSplit split_;
  std::size_t m_;
  std::map<Key, Series> series_;
};

}  // namespace

DurationSample DurationSample::make(NodeId node, Timestamp arrival, Seconds duration) {
  DurationSample s;
  s.duration = static_cast<double>(duration);
  s.arrival = arrival;
  s.node_id = node;
  s.bins = calendar_bins(arrival);
  return s;
}

std::string TemporalConfig::label() const {
  switch (kind) {
    case Kind::Mean: return "mean";
    case Kind::Percentile: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "pctl%g", percentile);
      return buf;
    }
    case Kind::Discretized:
      return "td_" + std::string(set_name(td_set)) +
             (statistic == Statistic::Mean ? "_mean" : "_median");
    case Kind::Hwes: {
      std::string label = "hwes_" + std::string(split_name(split));
      if (season_length != hwes::kDefaultSeasonLength) label += "_m" + std::to_string(season_length);
      return label;
    }
  }
  return "?";
}

void validate(const TemporalConfig& config) {
  if (config.kind == TemporalConfig::Kind::Percentile &&
      !(config.percentile >= 0.0 && config.percentile <= 100.0)) {
    throw std::invalid_argument("percentile must lie in [0, 100]");
  }
  if (config.kind == TemporalConfig::Kind::Hwes && config.season_length < 2) {
    throw std::invalid_argument("HWES season length must be >= 2");
  }
}

std::unique_ptr<TemporalPredictor> make_temporal_predictor(const TemporalConfig& config) {
  validate(config);
  switch (config.kind) {
    case TemporalConfig::Kind::Mean: return std::make_unique<MeanPredictor>();
    case TemporalConfig::Kind::Percentile:
      return std::make_unique<PercentilePredictor>(config.percentile);
    case TemporalConfig::Kind::Discretized:
      return std::make_unique<DiscretizedPredictor>(config.td_set, config.statistic);
    case TemporalConfig::Kind::Hwes:
      return std::make_unique<HwesPredictor>(config.split, config.season_length);
  }
  return nullptr;
}

double percentile(std::span<const double> sorted, double k) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(k >= 0.0 && k <= 100.0)) throw std::invalid_argument("percentile outside [0, 100]");
  const double rank = k / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  // The clamp keeps the result monotone in k across rank boundaries.
  return std::min(sorted[lo] + frac * (sorted[hi] - sorted[lo]), sorted[hi]);
}

std::optional<double> td_fallback(std::span<const std::optional<double>> bin_stats, int target) {
  const int n = static_cast<int>(bin_stats.size());
  if (n == 0) return std::nullopt;
  target = ((target % n) + n) % n;
  for (int d = 0; d <= n / 2; ++d) {
    double sum = 0.0;
    int found = 0;
    const int up = (target + d) % n;
    const int down = ((target - d) % n + n) % n;
    if (bin_stats[up]) {
      sum += *bin_stats[up];
      ++found;
    }
    if (down != up && bin_stats[down]) {
      sum += *bin_stats[down];
      ++found;
    }
    if (found > 0) return sum / found;
  }
  return std::nullopt;
}

double aggregate_over_pause(const hwes::Forecaster& f, double pause) {
  auto next = [&f](std::size_t h) { return std::max(kMinForecast, f.at(h)); };
  if (pause <= 0.0) return next(1);

  using Method = hwes::Forecaster::Method;
  const std::size_t cycle =
      f.method() == Method::Seasonal ? f.state().seasonals.size() : std::size_t{1};
  const bool settles = f.method() == Method::Mean || f.state().trend <= 0.0;

  double sum = 0.0;
  std::size_t clamped_run = 0;
  for (std::size_t h = 1;; ++h) {
    const double raw = f.at(h);
    const double y = std::max(kMinForecast, raw);
    sum += y;
    if (sum >= pause) return sum - pause;
    clamped_run = raw <= kMinForecast ? clamped_run + 1 : 0;
    // Constant from here on: a mean forecast, or a non-increasing trend that
    // has pushed a whole season to the clamp.
    const bool constant = f.method() == Method::Mean || (settles && clamped_run >= cycle);
    if (constant) {
      const double step = f.method() == Method::Mean ? y : kMinForecast;
      const double steps = std::ceil((pause - sum) / step);
      double total = sum + steps * step;
      if (total < pause) total += step;
      return total - pause;
    }
  }
}

std::optional<double> hwes_predict_with_pause(std::span<const double> series, double pause,
                                              std::size_t season_length) {
  const auto f = hwes::Forecaster::build(series, season_length);
  if (!f) return std::nullopt;
  return aggregate_over_pause(*f, pause);
}

void write_series_forecast(std::ostream& out, std::span<const double> series,
                           std::size_t season_length) {
  out << "index,duration,forecast\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << i << ',' << series[i] << ',';
    if (const auto f = hwes::Forecaster::build(series.first(i), season_length)) out << f->at(1);
    out << '\n';
  }
}

}  // namespace fogrep
