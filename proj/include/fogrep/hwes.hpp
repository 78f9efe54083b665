#pragma once

// Additive Holt-Winters triple exponential smoothing with a grid-searched
// parameter fit, plus the Holt / mean ladder used for short series.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fogrep::hwes {

inline constexpr std::size_t kDefaultSeasonLength = 7;

/// Candidate values for every smoothing factor during the fit.
inline constexpr double kParamGrid[] = {0.1, 0.3, 0.5, 0.7, 0.9};

struct HwesParams {
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 0.5;
  std::size_t m = kDefaultSeasonLength;

  friend bool operator==(const HwesParams&, const HwesParams&) = default;
};

/// Smoother state after `t` observations. `seasonals` holds
/// s_{t-m+1} .. s_t, oldest first.
struct HwesState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonals;
  std::size_t t = 0;
};

struct HwesFit {
  HwesParams params;
  HwesState state;
  double sse = 0.0;  // one-step-ahead squared error at the chosen params
};

/// Runs the additive recursions over the whole series with fixed
/// parameters. Requires series.size() >= 2m and m >= 2.
HwesState run_seasonal(std::span<const double> series, const HwesParams& params);

/// Grid search over alpha, beta, gamma in kParamGrid minimizing the
/// one-step-ahead squared error; exact ties keep the lexicographically
/// smallest triple. nullopt when m < 2 or the series is shorter than 2m.
std::optional<HwesFit> fit(std::span<const double> series, std::size_t m);

/// l_t + h b_t + s_{t+h-m(floor((h-1)/m)+1)}, h >= 1.
double forecast(const HwesParams& params, const HwesState& state, std::size_t h);

/// Holt's linear method (no seasonal term), grid-searched over alpha and
/// beta. Requires at least two observations.
HwesFit fit_holt(std::span<const double> series);
HwesState run_holt(std::span<const double> series, double alpha, double beta);

/// Degradation ladder for series too short to fit seasonally: Holt from
/// four observations, arithmetic mean below that, nullopt when empty.
std::optional<double> fallback_forecast(std::span<const double> series, std::size_t h);

/// Whatever the ladder supports for a series, fitted once and queried for
/// successive horizons.
class Forecaster {
 public:
  enum class Method { Seasonal, Holt, Mean };

  /// nullopt for an empty series.
  static std::optional<Forecaster> build(std::span<const double> series, std::size_t m);

  Method method() const { return method_; }
  const HwesParams& params() const { return params_; }
  const HwesState& state() const { return state_; }

  double at(std::size_t h) const;

 private:
  Method method_ = Method::Mean;
  HwesParams params_;
  HwesState state_;
  double mean_ = 0.0;
};

}  // namespace fogrep::hwes
