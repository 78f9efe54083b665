#include <immintrin.h>

#include <algorithm>
#include <array>
#include <vector>

#include "fogrep/kernels.hpp"
#include "kernels_impl.hpp"

namespace fogrep::kernels {

namespace {

void haversine_terms_avx2(const PointTrig& p, const TrigTable& nodes, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d p_sin_lat = _mm256_set1_pd(p.sin_lat);
  const __m256d p_cos_lat = _mm256_set1_pd(p.cos_lat);
  const __m256d p_sin_lon = _mm256_set1_pd(p.sin_lon);
  const __m256d p_cos_lon = _mm256_set1_pd(p.cos_lon);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cos_lat_prod = _mm256_mul_pd(p_cos_lat, _mm256_loadu_pd(&nodes.cos_lat[i]));
    const __m256d cos_dlat =
        _mm256_add_pd(cos_lat_prod, _mm256_mul_pd(p_sin_lat, _mm256_loadu_pd(&nodes.sin_lat[i])));
    const __m256d cos_dlon =
        _mm256_add_pd(_mm256_mul_pd(p_cos_lon, _mm256_loadu_pd(&nodes.cos_lon[i])),
                      _mm256_mul_pd(p_sin_lon, _mm256_loadu_pd(&nodes.sin_lon[i])));
    const __m256d hav_lat = _mm256_mul_pd(_mm256_sub_pd(one, cos_dlat), half);
    const __m256d hav_lon = _mm256_mul_pd(_mm256_sub_pd(one, cos_dlon), half);
    _mm256_storeu_pd(&out[i], _mm256_add_pd(hav_lat, _mm256_mul_pd(cos_lat_prod, hav_lon)));
  }
  if (i < n) {
    const TrigTable tail{nodes.sin_lat.subspan(i), nodes.cos_lat.subspan(i),
                         nodes.sin_lon.subspan(i), nodes.cos_lon.subspan(i)};
    haversine_terms_scalar(p, tail, out.subspan(i));
  }
}

// Four parameter triples per register; each lane runs the scalar recursion
// verbatim.
void smoothing_sse_avx2(std::span<const double> series, const SmoothingStart& start,
                        std::span<const SmoothingParams> params, std::span<double> out) {
  const std::size_t m = start.seasonals.size();
  struct Slot {
    __m256d v;
  };
  std::vector<Slot> seas(m);
  const __m256d one = _mm256_set1_pd(1.0);

  for (std::size_t k = 0; k < params.size(); k += 4) {
    std::array<double, 4> av, bv, gv;
    for (std::size_t lane = 0; lane < 4; ++lane) {
      const auto& prm = params[std::min(k + lane, params.size() - 1)];
      av[lane] = prm.alpha;
      bv[lane] = prm.beta;
      gv[lane] = prm.gamma;
    }
    const __m256d a = _mm256_loadu_pd(av.data());
    const __m256d b = _mm256_loadu_pd(bv.data());
    const __m256d g = _mm256_loadu_pd(gv.data());
    const __m256d one_minus_a = _mm256_sub_pd(one, a);
    const __m256d one_minus_b = _mm256_sub_pd(one, b);
    const __m256d one_minus_g = _mm256_sub_pd(one, g);

    for (std::size_t j = 0; j < m; ++j) seas[j].v = _mm256_set1_pd(start.seasonals[j]);
    __m256d level = _mm256_set1_pd(start.level);
    __m256d trend = _mm256_set1_pd(start.trend);
    __m256d sse = _mm256_setzero_pd();

    for (std::size_t t = start.first; t < series.size(); ++t) {
      const __m256d y = _mm256_set1_pd(series[t]);
      __m256d& s = seas[t % m].v;
      const __m256d pred = _mm256_add_pd(_mm256_add_pd(level, trend), s);
      const __m256d err = _mm256_sub_pd(y, pred);
      sse = _mm256_add_pd(sse, _mm256_mul_pd(err, err));
      const __m256d prev_level = level;
      const __m256d prev_trend = trend;
      level = _mm256_add_pd(_mm256_mul_pd(a, _mm256_sub_pd(y, s)),
                            _mm256_mul_pd(one_minus_a, _mm256_add_pd(prev_level, prev_trend)));
      trend = _mm256_add_pd(_mm256_mul_pd(b, _mm256_sub_pd(level, prev_level)),
                            _mm256_mul_pd(one_minus_b, prev_trend));
      s = _mm256_add_pd(
          _mm256_mul_pd(g, _mm256_sub_pd(_mm256_sub_pd(y, prev_level), prev_trend)),
          _mm256_mul_pd(one_minus_g, s));
    }

    std::array<double, 4> lanes;
    _mm256_storeu_pd(lanes.data(), sse);
    for (std::size_t lane = 0; lane < 4 && k + lane < params.size(); ++lane) {
      out[k + lane] = lanes[lane];
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &haversine_terms_avx2, &smoothing_sse_avx2};
  return table;
}

}  // namespace fogrep::kernels
