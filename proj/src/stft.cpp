#include "maskmark/stft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskmark {

void fft(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft size must be a power of two");

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= inv_n;
  }
}

int Stft::window_for(int sample_rate) {
  const int target = static_cast<int>(std::lround(0.032 * sample_rate));
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(target, 16))));
}

Stft::Stft(std::span<const double> x, int window)
    : n_(window), input_len_(x.size()) {
  if (n_ < 2 || (n_ & (n_ - 1)) != 0)
    throw std::invalid_argument("window must be a power of two");
  window_fn_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    // periodic Hann: w[i] + w[i + N/2] == 1, so half-overlap add is exact
    window_fn_[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n_);
  }

  const std::size_t hop_sz = static_cast<std::size_t>(hop());
  const std::size_t padded = hop_sz + x.size() + 2 * static_cast<std::size_t>(n_);
  const std::size_t count = (padded - static_cast<std::size_t>(n_)) / hop_sz + 1;
  spectra_.resize(count);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n_));
  for (std::size_t f = 0; f < count; ++f) {
    for (int i = 0; i < n_; ++i) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(f * hop_sz) + i -
                                 static_cast<std::ptrdiff_t>(hop_sz);
      const double v =
          (src >= 0 && src < static_cast<std::ptrdiff_t>(x.size()))
              ? x[static_cast<std::size_t>(src)]
              : 0.0;
      buf[static_cast<std::size_t>(i)] = v * window_fn_[static_cast<std::size_t>(i)];
    }
    fft(buf, false);
    spectra_[f] = buf;
  }
}

std::vector<double> Stft::synthesize() const {
  const std::size_t hop_sz = static_cast<std::size_t>(hop());
  const std::size_t total = hop_sz + input_len_ + 2 * static_cast<std::size_t>(n_);
  std::vector<double> acc(total, 0.0);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n_));
  for (std::size_t f = 0; f < spectra_.size(); ++f) {
    buf = spectra_[f];
    fft(buf, true);
    const std::size_t base = f * hop_sz;
    for (int i = 0; i < n_; ++i) {
      if (base + static_cast<std::size_t>(i) < total)
        acc[base + static_cast<std::size_t>(i)] +=
            buf[static_cast<std::size_t>(i)].real();
    }
  }
  return {acc.begin() + static_cast<std::ptrdiff_t>(hop_sz),
          acc.begin() + static_cast<std::ptrdiff_t>(hop_sz + input_len_)};
}

}  // namespace maskmark
