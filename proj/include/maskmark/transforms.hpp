#pragma once

#include <span>
#include <vector>

#include "maskmark/errors.hpp"

namespace maskmark {

// Orthonormal 3-level Haar decomposition of an L-sample frame (L % 8 == 0).
// Total coefficient count equals L and energy is preserved.
struct WaveletPyramid {
  std::vector<double> c3;  // approximation, L/8
  std::vector<double> d3;  // detail level 3, L/8
  std::vector<double> d2;  // detail level 2, L/4
  std::vector<double> d1;  // detail level 1, L/2

  std::size_t frame_len() const { return d1.size() * 2; }
};

WaveletPyramid dwt3(std::span<const double> frame);   // throws BadLength
std::vector<double> idwt3(const WaveletPyramid& p);   // throws BadLength

// Orthonormal DCT-II of size n: X[k] = s(k) * sum_i x[i] cos(pi(2i+1)k/(2n)),
// s(0) = sqrt(1/n), s(k>0) = sqrt(2/n). inverse() is the exact transpose.
class DctPlan {
 public:
  explicit DctPlan(int n);
  int size() const { return n_; }
  void forward(std::span<const double> in, std::span<double> out) const;
  void inverse(std::span<const double> in, std::span<double> out) const;

 private:
  int n_;
  std::vector<double> fwd_;  // row-major n x n
  std::vector<double> inv_;  // transpose of fwd_
};

// Convenience entry points; plans are cached per size (thread-local).
std::vector<double> dct(std::span<const double> v);
std::vector<double> idct(std::span<const double> v);

// DCT spectra of the two level-3 subbands. x_c covers 0..fs/16, x_d covers
// fs/16..fs/8, both with L/8 coefficients.
struct SubbandSpectrum {
  std::vector<double> x_c;
  std::vector<double> x_d;
};

SubbandSpectrum subband_spectrum(const WaveletPyramid& p, const DctPlan& plan);

}  // namespace maskmark
