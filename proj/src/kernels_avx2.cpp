// AVX2/FMA variants. Runtime-selected in kernels.cpp; never called unless
// the CPU reports avx2+fma support.

#include "maskmark/kernels.hpp"

#if defined(MASKMARK_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace maskmark::kernels {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void haar_analysis_avx2(const double* x, std::size_t pairs, double* approx,
                        double* detail) {
  const __m256d inv = _mm256_set1_pd(kInvSqrt2);
  std::size_t i = 0;
  for (; i + 4 <= pairs; i += 4) {
    __m256d v0 = _mm256_loadu_pd(x + 2 * i);      // x0 x1 x2 x3
    __m256d v1 = _mm256_loadu_pd(x + 2 * i + 4);  // x4 x5 x6 x7
    __m256d t0 = _mm256_permute2f128_pd(v0, v1, 0x20);  // x0 x1 x4 x5
    __m256d t1 = _mm256_permute2f128_pd(v0, v1, 0x31);  // x2 x3 x6 x7
    __m256d even = _mm256_unpacklo_pd(t0, t1);          // x0 x2 x4 x6
    __m256d odd = _mm256_unpackhi_pd(t0, t1);           // x1 x3 x5 x7
    _mm256_storeu_pd(approx + i,
                     _mm256_mul_pd(_mm256_add_pd(even, odd), inv));
    _mm256_storeu_pd(detail + i,
                     _mm256_mul_pd(_mm256_sub_pd(even, odd), inv));
  }
  for (; i < pairs; ++i) {
    const double a = x[2 * i];
    const double b = x[2 * i + 1];
    approx[i] = (a + b) * kInvSqrt2;
    detail[i] = (a - b) * kInvSqrt2;
  }
}

void haar_synthesis_avx2(const double* approx, const double* detail,
                         std::size_t pairs, double* x) {
  const __m256d inv = _mm256_set1_pd(kInvSqrt2);
  std::size_t i = 0;
  for (; i + 4 <= pairs; i += 4) {
    __m256d a = _mm256_loadu_pd(approx + i);
    __m256d d = _mm256_loadu_pd(detail + i);
    __m256d s = _mm256_mul_pd(_mm256_add_pd(a, d), inv);  // even samples
    __m256d t = _mm256_mul_pd(_mm256_sub_pd(a, d), inv);  // odd samples
    __m256d lo = _mm256_unpacklo_pd(s, t);  // s0 t0 s2 t2
    __m256d hi = _mm256_unpackhi_pd(s, t);  // s1 t1 s3 t3
    _mm256_storeu_pd(x + 2 * i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(x + 2 * i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  for (; i < pairs; ++i) {
    const double a = approx[i];
    const double d = detail[i];
    x[2 * i] = (a + d) * kInvSqrt2;
    x[2 * i + 1] = (a - d) * kInvSqrt2;
  }
}

inline double dot_avx2_impl(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_avx2(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot_avx2_impl(m + r * cols, x, cols);
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  return dot_avx2_impl(a, b, n);
}

double sum_squares_avx2(const double* x, std::size_t n) {
  return dot_avx2_impl(x, x, n);
}

void qim_embed_span_avx2(double* x, std::size_t n, const std::uint8_t* bits,
                         double delta) {
  const double q = 2.0 * delta;
  const double inv_q = 1.0 / q;
  const __m256d qv = _mm256_set1_pd(q);
  const __m256d invqv = _mm256_set1_pd(inv_q);
  const __m256d deltav = _mm256_set1_pd(delta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sel = _mm256_set_pd(
        bits[i + 3] ? 1.0 : 0.0, bits[i + 2] ? 1.0 : 0.0,
        bits[i + 1] ? 1.0 : 0.0, bits[i + 0] ? 1.0 : 0.0);
    const __m256d dither = _mm256_mul_pd(sel, deltav);
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d lattice = _mm256_round_pd(
        _mm256_mul_pd(_mm256_sub_pd(v, dither), invqv),
        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    // mul then add (no fma) to match the scalar reference bit for bit
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_mul_pd(lattice, qv), dither));
  }
  for (; i < n; ++i) {
    const double dither = bits[i] ? delta : 0.0;
    const double lattice = std::nearbyint((x[i] - dither) * inv_q);
    x[i] = lattice * q + dither;
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{
      "avx2",      haar_analysis_avx2, haar_synthesis_avx2,
      matvec_avx2, dot_avx2,           sum_squares_avx2,
      qim_embed_span_avx2,
  };
  return ops;
}

}  // namespace maskmark::kernels

#endif  // MASKMARK_HAVE_AVX2
