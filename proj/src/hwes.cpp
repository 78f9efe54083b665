#include "fogrep/hwes.hpp"

#include <array>
#include <numeric>
#include <stdexcept>

#include "fogrep/kernels.hpp"

namespace fogrep::hwes {

namespace {

constexpr std::size_t kGridSize = std::size(kParamGrid);

struct SeasonalStart {
  double level;
  double trend;
  std::vector<double> seasonals;  // indexed by t % m
};

// Level and seasonals are centred on the first-season trend line so that a
// purely linear series starts (and stays) on its exact continuation.
SeasonalStart seasonal_start(std::span<const double> y, std::size_t m) {
  const auto md = static_cast<double>(m);
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    first += y[i];
    second += y[m + i];
  }
  first /= md;
  second /= md;
  SeasonalStart s;
  s.trend = (second - first) / md;
  const double centre = (md - 1.0) / 2.0;
  s.level = first + s.trend * centre;
  s.seasonals.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.seasonals[i] = y[i] - (first + s.trend * (static_cast<double>(i) - centre));
  }
  return s;
}

// Same arithmetic, in the same order, as the smoothing_sse kernels.
struct Smoother {
  double level;
  double trend;
  std::vector<double> slots;

  void consume(std::size_t t, double y, double a, double b, double g) {
    double& s = slots[t % slots.size()];
    const double prev_level = level;
    const double prev_trend = trend;
    level = a * (y - s) + (1.0 - a) * (prev_level + prev_trend);
    trend = b * (level - prev_level) + (1.0 - b) * prev_trend;
    s = g * ((y - prev_level) - prev_trend) + (1.0 - g) * s;
  }
};

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string("smoothing factor ") + name + " outside [0, 1]");
  }
}

}  // namespace

HwesState run_seasonal(std::span<const double> series, const HwesParams& params) {
  const std::size_t m = params.m;
  if (m < 2 || series.size() < 2 * m) {
    throw std::invalid_argument("seasonal smoothing needs m >= 2 and at least 2m observations");
  }
  check_unit(params.alpha, "alpha");
  check_unit(params.beta, "beta");
  check_unit(params.gamma, "gamma");
  SeasonalStart init = seasonal_start(series, m);
  Smoother sm{init.level, init.trend, std::move(init.seasonals)};
  for (std::size_t t = m; t < series.size(); ++t) {
    sm.consume(t, series[t], params.alpha, params.beta, params.gamma);
  }
  HwesState state;
  state.level = sm.level;
  state.trend = sm.trend;
  state.t = series.size();
  state.seasonals.resize(m);
  // Oldest stored seasonal belongs to time n - m, i.e. slot n % m.
  for (std::size_t i = 0; i < m; ++i) state.seasonals[i] = sm.slots[(series.size() + i) % m];
  return state;
}

std::optional<HwesFit> fit(std::span<const double> series, std::size_t m) {
  if (m < 2 || series.size() < 2 * m) return std::nullopt;

  const SeasonalStart init = seasonal_start(series, m);
  std::array<kernels::SmoothingParams, kGridSize * kGridSize * kGridSize> grid;
  std::size_t k = 0;
  for (double a : kParamGrid)
    for (double b : kParamGrid)
      for (double g : kParamGrid) grid[k++] = {a, b, g};

  std::array<double, grid.size()> sse;
  const kernels::SmoothingStart start{init.level, init.trend, init.seasonals, m};
  kernels::active_kernels().smoothing_sse(series, start, grid, sse);

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (sse[i] < sse[best]) best = i;
  }
  HwesFit out;
  out.params = {grid[best].alpha, grid[best].beta, grid[best].gamma, m};
  out.state = run_seasonal(series, out.params);
  out.sse = sse[best];
  return out;
}

double forecast(const HwesParams& /*params*/, const HwesState& state, std::size_t h) {
  if (h == 0) throw std::invalid_argument("forecast horizon must be >= 1");
  double y = state.level + static_cast<double>(h) * state.trend;
  if (!state.seasonals.empty()) y += state.seasonals[(h - 1) % state.seasonals.size()];
  return y;
}

HwesState run_holt(std::span<const double> series, double alpha, double beta) {
  if (series.size() < 2) throw std::invalid_argument("Holt smoothing needs two observations");
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  Smoother sm{series[0], series[1] - series[0], {0.0}};
  for (std::size_t t = 1; t < series.size(); ++t) sm.consume(t, series[t], alpha, beta, 0.0);
  HwesState state;
  state.level = sm.level;
  state.trend = sm.trend;
  state.t = series.size();
  return state;
}

HwesFit fit_holt(std::span<const double> series) {
  if (series.size() < 2) throw std::invalid_argument("Holt smoothing needs two observations");
  std::array<kernels::SmoothingParams, kGridSize * kGridSize> grid;
  std::size_t k = 0;
  for (double a : kParamGrid)
    for (double b : kParamGrid) grid[k++] = {a, b, 0.0};

  const double zero_season[] = {0.0};
  const kernels::SmoothingStart start{series[0], series[1] - series[0], zero_season, 1};
  std::array<double, grid.size()> sse;
  kernels::active_kernels().smoothing_sse(series, start, grid, sse);

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (sse[i] < sse[best]) best = i;
  }
  HwesFit out;
  out.params = {grid[best].alpha, grid[best].beta, 0.0, 1};
  out.state = run_holt(series, grid[best].alpha, grid[best].beta);
  out.sse = sse[best];
  return out;
}

std::optional<double> fallback_forecast(std::span<const double> series, std::size_t h) {
  if (series.empty()) return std::nullopt;
  if (series.size() >= 4) {
    const HwesFit f = fit_holt(series);
    return forecast(f.params, f.state, h);
  }
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

std::optional<Forecaster> Forecaster::build(std::span<const double> series, std::size_t m) {
  if (series.empty()) return std::nullopt;
  Forecaster f;
  if (auto seasonal = fit(series, m)) {
    f.method_ = Method::Seasonal;
    f.params_ = seasonal->params;
    f.state_ = std::move(seasonal->state);
  } else if (series.size() >= 4) {
    HwesFit holt = fit_holt(series);
    f.method_ = Method::Holt;
    f.params_ = holt.params;
    f.state_ = std::move(holt.state);
  } else {
    f.method_ = Method::Mean;
    f.mean_ = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  }
  return f;
}

double Forecaster::at(std::size_t h) const {
  if (method_ == Method::Mean) return mean_;
  return forecast(params_, state_, h);
}

}  // namespace fogrep::hwes
