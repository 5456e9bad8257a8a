#include "maskmark/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace maskmark::kernels {

const Ops& scalar_ops();

#if defined(MASKMARK_HAVE_AVX2)
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MASKMARK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* pick_default() {
  if (const char* env = std::getenv("MASKMARK_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
#if defined(MASKMARK_HAVE_AVX2)
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &avx2_ops();
#endif
  }
#if defined(MASKMARK_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_ops();
#endif
  return &scalar_ops();
}

std::atomic<const Ops*>& active_ptr() {
  static std::atomic<const Ops*> ptr{pick_default()};
  return ptr;
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const Ops& ops(Backend b) {
  switch (b) {
    case Backend::scalar:
      return scalar_ops();
    case Backend::avx2:
#if defined(MASKMARK_HAVE_AVX2)
      if (cpu_has_avx2()) return avx2_ops();
#endif
      throw std::invalid_argument("avx2 backend not available on this host");
  }
  throw std::invalid_argument("unknown backend");
}

const Ops& active() { return *active_ptr().load(std::memory_order_relaxed); }

Backend active_backend() {
  return std::strcmp(active().name, "avx2") == 0 ? Backend::avx2
                                                 : Backend::scalar;
}

void force_backend(Backend b) {
  active_ptr().store(&ops(b), std::memory_order_relaxed);
}

void reset_backend() {
  active_ptr().store(pick_default(), std::memory_order_relaxed);
}

}  // namespace maskmark::kernels
