#pragma once

#include <cstddef>
#include <cstdint>

// Hot inner loops, implemented as scalar reference kernels plus an AVX2
// variant selected at runtime. The scalar path is the semantic reference;
// SIMD variants are equivalence-tested against it.
//
// haar_analysis/haar_synthesis and qim_embed_span are element-independent
// and produce bit-identical results across backends. matvec/dot/sum_squares
// reassociate the accumulation, so backends agree only to rounding error.

namespace maskmark::kernels {

struct Ops {
  const char* name;
  // pairs of (x[2i], x[2i+1]) -> approx[i] = (a+b)/sqrt2, detail[i] = (a-b)/sqrt2
  void (*haar_analysis)(const double* x, std::size_t pairs, double* approx,
                        double* detail);
  // inverse: x[2i] = (a+d)/sqrt2, x[2i+1] = (a-d)/sqrt2
  void (*haar_synthesis)(const double* approx, const double* detail,
                         std::size_t pairs, double* x);
  // y[r] = sum_c m[r*cols + c] * x[c]
  void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // x[i] -> nearest point of the bits[i]-coset of the step-2*delta lattice
  void (*qim_embed_span)(double* x, std::size_t n, const std::uint8_t* bits,
                         double delta);
};

enum class Backend { scalar, avx2 };

bool supported(Backend b);
const Ops& ops(Backend b);  // throws std::invalid_argument if unsupported

// Active backend: best supported one, unless MASKMARK_BACKEND=scalar|avx2
// is set in the environment or force_backend() was called.
const Ops& active();
Backend active_backend();
void force_backend(Backend b);
void reset_backend();

}  // namespace maskmark::kernels
