#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants,
// selected once at runtime. Every variant must agree bit-for-bit with the
// scalar reference: same operation order per lane, no fused multiply-add.

#include <cstddef>
#include <span>
#include <string_view>

namespace fogrep::kernels {

/// Node centers as structure-of-arrays trig tables.
struct TrigTable {
  std::span<const double> sin_lat;
  std::span<const double> cos_lat;
  std::span<const double> sin_lon;
  std::span<const double> cos_lon;
};

struct PointTrig {
  double sin_lat;
  double cos_lat;
  double sin_lon;
  double cos_lon;
};

/// One additive Holt-Winters parameter triple. Holt's linear method is the
/// same recursion run with a single all-zero seasonal slot and gamma = 0.
struct SmoothingParams {
  double alpha;
  double beta;
  double gamma;
};

/// Smoother state right before observation `first` is consumed.
struct SmoothingStart {
  double level;
  double trend;
  std::span<const double> seasonals;  // seasonals[t % m] pairs with y_t
  std::size_t first;
};

/// Haversine term a = hav(dlat) + cos(lat1) cos(lat2) hav(dlon) from one
/// point to every node; out.size() == nodes.sin_lat.size().
using HaversineTermFn = void (*)(const PointTrig& point, const TrigTable& nodes,
                                 std::span<double> out);

/// Sum of squared one-step-ahead errors over series[first..] for each
/// parameter triple; out.size() == params.size().
using SmoothingSseFn = void (*)(std::span<const double> series, const SmoothingStart& start,
                                std::span<const SmoothingParams> params, std::span<double> out);

struct KernelTable {
  std::string_view name;
  HaversineTermFn haversine_terms;
  SmoothingSseFn smoothing_sse;
};

const KernelTable& scalar_kernels();

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

enum class Preference { Auto, Scalar };

/// Kernels used by the library. Auto picks the widest supported variant.
const KernelTable& active_kernels();
void set_preference(Preference p);

}  // namespace fogrep::kernels
