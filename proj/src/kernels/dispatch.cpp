#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fogrep/kernels.hpp"
#include "kernels_impl.hpp"

namespace fogrep::kernels {

namespace {

// FOGREP_KERNELS=scalar forces the reference kernels.
Preference initial_preference() {
  const char* v = std::getenv("FOGREP_KERNELS");
  return v && std::strcmp(v, "scalar") == 0 ? Preference::Scalar : Preference::Auto;
}

std::atomic<Preference> g_preference{initial_preference()};

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(FOGREP_HAVE_AVX2_KERNELS)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  if (g_preference.load(std::memory_order_relaxed) == Preference::Auto) {
    if (const KernelTable* wide = avx2_kernels()) return *wide;
  }
  return scalar_kernels();
}

void set_preference(Preference p) { g_preference.store(p, std::memory_order_relaxed); }

}  // namespace fogrep::kernels
