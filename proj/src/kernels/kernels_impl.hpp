#pragma once

#include "fogrep/kernels.hpp"

namespace fogrep::kernels {

void haversine_terms_scalar(const PointTrig& p, const TrigTable& nodes, std::span<double> out);
void smoothing_sse_scalar(std::span<const double> series, const SmoothingStart& start,
                          std::span<const SmoothingParams> params, std::span<double> out);

#if defined(FOGREP_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

}  // namespace fogrep::kernels
