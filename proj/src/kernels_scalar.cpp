// Reference kernels. Compiled with -ffp-contract=off so the element-wise
// kernels (haar, qim) are bit-identical to the SIMD variants, which use
// explicit mul/add intrinsics for those paths.

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "maskmark/kernels.hpp"

namespace maskmark::kernels {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void haar_analysis_scalar(const double* x, std::size_t pairs, double* approx,
                          double* detail) {
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = x[2 * i];
    const double b = x[2 * i + 1];
    approx[i] = (a + b) * kInvSqrt2;
    detail[i] = (a - b) * kInvSqrt2;
  }
}

void haar_synthesis_scalar(const double* approx, const double* detail,
                           std::size_t pairs, double* x) {
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = approx[i];
    const double d = detail[i];
    x[2 * i] = (a + d) * kInvSqrt2;
    x[2 * i + 1] = (a - d) * kInvSqrt2;
  }
}

void matvec_scalar(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void qim_embed_span_scalar(double* x, std::size_t n, const std::uint8_t* bits,
                           double delta) {
  const double q = 2.0 * delta;
  const double inv_q = 1.0 / q;
  for (std::size_t i = 0; i < n; ++i) {
    const double dither = bits[i] ? delta : 0.0;
    // nearbyint: ties to even, matching the vector rounding mode
    const double lattice = std::nearbyint((x[i] - dither) * inv_q);
    x[i] = lattice * q + dither;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",          haar_analysis_scalar, haar_synthesis_scalar,
      matvec_scalar,     dot_scalar,           sum_squares_scalar,
      qim_embed_span_scalar,
  };
  return ops;
}

}  // namespace maskmark::kernels
