#pragma once

// Stay-duration predictors that plug into the spatial model: node mean,
// node percentile, time-discretized statistic, and Holt-Winters forecasts
// over user/node/discretization data splits.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogrep/calendar.hpp"
#include "fogrep/hwes.hpp"

namespace fogrep {

struct DurationSample {
  double duration = 0.0;  // seconds, > 0
  Timestamp arrival = 0;
  NodeId node_id = 0;
  CalendarBins bins;

  static DurationSample make(NodeId node, Timestamp arrival, Seconds duration);
  Timestamp end() const { return arrival + static_cast<Timestamp>(duration); }
};

struct PredictionContext {
  NodeId node_id = 0;
  Timestamp arrival = 0;
  Timestamp now = 0;
};

enum class TdSet { Hours, DaysOfWeek, Months };
enum class Statistic { Mean, Median };
enum class HwesSplit { Discretization, Node, User };

struct TemporalConfig {
  enum class Kind { Mean, Percentile, Discretized, Hwes };

  Kind kind = Kind::Mean;
  double percentile = 50.0;  // Percentile only, in [0, 100]
  TdSet td_set = TdSet::Hours;
  Statistic statistic = Statistic::Mean;
  HwesSplit split = HwesSplit::User;
  std::size_t season_length = hwes::kDefaultSeasonLength;

  /// Short stable name, e.g. "mean", "pctl50", "td_days_of_week_median",
  /// "hwes_user".
  std::string label() const;
};

/// Throws std::invalid_argument for out-of-range parameters.
void validate(const TemporalConfig& config);

class TemporalPredictor {
 public:
  virtual ~TemporalPredictor() = default;

  virtual void record(const DurationSample& sample) = 0;

  /// Predicted stay in seconds for a visit to context.node_id that began at
  /// context.arrival; nullopt when the addressed history is empty.
  virtual std::optional<double> predict(const PredictionContext& context) const = 0;
};

std::unique_ptr<TemporalPredictor> make_temporal_predictor(const TemporalConfig& config);

/// k-th percentile with linear interpolation between closest ranks.
/// `sorted` must be ascending and non-empty; 0 <= k <= 100.
double percentile(std::span<const double> sorted, double k);

/// Nearest non-empty bins on the cycle. At the smallest distance d with any
/// non-empty bin, returns the mean of the statistics of all non-empty bins
/// exactly d away from `target`. nullopt when every bin is empty.
std::optional<double> td_fallback(std::span<const std::optional<double>> bin_stats, int target);

/// Sums successive forecasts (each clamped to >= 1 s) until they cover
/// `pause`, and returns the part of the last summed forecast that lies
/// beyond it. pause == 0 yields the first forecast. nullopt for an empty
/// series.
std::optional<double> hwes_predict_with_pause(std::span<const double> series, double pause,
                                              std::size_t season_length);

/// Same aggregation over an arbitrary forecast source (h = 1, 2, ...).
double aggregate_over_pause(const hwes::Forecaster& forecaster, double pause);

/// Rolling one-step forecasts: row i holds series[i] and the forecast made
/// from series[0, i) (empty when i == 0). Header `index,duration,forecast`.
void write_series_forecast(std::ostream& out, std::span<const double> series,
                           std::size_t season_length);

}  // namespace fogrep
