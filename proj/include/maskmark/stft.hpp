#pragma once

#include <complex>
#include <span>
#include <vector>

namespace maskmark {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::span<std::complex<double>> data, bool inverse);

// Half-overlap Hann STFT used by the denoiser and the spectral metrics.
// With unit gains the analysis windows alone satisfy COLA, so
// overlap-add reconstruction is exact to rounding.
class Stft {
 public:
  // window ~32 ms rounded up to a power of two
  static int window_for(int sample_rate);

  Stft(std::span<const double> x, int window);

  int window() const { return n_; }
  int hop() const { return n_ / 2; }
  std::size_t frames() const { return spectra_.size(); }
  std::size_t bins() const { return static_cast<std::size_t>(n_) / 2 + 1; }

  const std::vector<std::complex<double>>& spectrum(std::size_t frame) const {
    return spectra_[frame];
  }
  std::vector<std::complex<double>>& spectrum(std::size_t frame) {
    return spectra_[frame];
  }

  // Overlap-add of the (possibly modified) spectra, trimmed to the
  // original signal length.
  std::vector<double> synthesize() const;

 private:
  int n_;
  std::size_t input_len_;
  std::vector<double> window_fn_;
  std::vector<std::vector<std::complex<double>>> spectra_;
};

}  // namespace maskmark
