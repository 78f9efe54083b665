#include <vector>

#include "fogrep/kernels.hpp"
#include "kernels_impl.hpp"

namespace fogrep::kernels {

void haversine_terms_scalar(const PointTrig& p, const TrigTable& nodes, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double cos_lat_prod = p.cos_lat * nodes.cos_lat[i];
    const double cos_dlat = cos_lat_prod + p.sin_lat * nodes.sin_lat[i];
    const double cos_dlon = p.cos_lon * nodes.cos_lon[i] + p.sin_lon * nodes.sin_lon[i];
    out[i] = (1.0 - cos_dlat) * 0.5 + cos_lat_prod * ((1.0 - cos_dlon) * 0.5);
  }
}

void smoothing_sse_scalar(std::span<const double> series, const SmoothingStart& start,
                          std::span<const SmoothingParams> params, std::span<double> out) {
  const std::size_t m = start.seasonals.size();
  std::vector<double> seas(m);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double a = params[k].alpha, one_minus_a = 1.0 - a;
    const double b = params[k].beta, one_minus_b = 1.0 - b;
    const double g = params[k].gamma, one_minus_g = 1.0 - g;
    seas.assign(start.seasonals.begin(), start.seasonals.end());
    double level = start.level;
    double trend = start.trend;
    double sse = 0.0;
    for (std::size_t t = start.first; t < series.size(); ++t) {
      const double y = series[t];
      double& s = seas[t % m];
      const double pred = (level + trend) + s;
      const double err = y - pred;
      sse = sse + err * err;
      const double prev_level = level;
      const double prev_trend = trend;
      level = a * (y - s) + one_minus_a * (prev_level + prev_trend);
      trend = b * (level - prev_level) + one_minus_b * prev_trend;
      s = g * ((y - prev_level) - prev_trend) + one_minus_g * s;
    }
    out[k] = sse;
  }
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &haversine_terms_scalar, &smoothing_sse_scalar};
  return table;
}

}  // namespace fogrep::kernels
