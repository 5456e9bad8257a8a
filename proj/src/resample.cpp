// Kaiser-windowed sinc rate converter. One prototype lowpass is designed at
// the lower of the two rates (cutoff 0.4975 of that Nyquist, half-width 256
// zero crossings, beta 8 -> ~80 dB stopband) and sampled into a dense table;
// taps for each output sample are linearly interpolated from it. Zero phase,
// per-output tap-sum normalization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "maskmark/audio_io.hpp"
#include "maskmark/kernels.hpp"

namespace maskmark {

namespace {

constexpr double kCutoff = 0.4975;   // cycles/sample at the lower rate
constexpr double kHalfWidth = 256.0; // samples at the lower rate
constexpr double kKaiserBeta = 8.0;
constexpr int kTableOversample = 128;

double bessel_i0(double x) {
  // power series; converges quickly for the argument range used here
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

struct KernelTable {
  std::vector<double> h;  // h[(u * oversample)] for u in [0, kHalfWidth]
  double entries_per_sample = kTableOversample;

  KernelTable() {
    const std::size_t n =
        static_cast<std::size_t>(kHalfWidth) * kTableOversample + 2;
    h.resize(n);
    const double i0b = bessel_i0(kKaiserBeta);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / kTableOversample;
      double w = 0.0;
      if (t <= kHalfWidth) {
        const double r = t / kHalfWidth;
        w = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
      }
      const double a = 2.0 * kCutoff * t;
      const double sinc =
          a == 0.0 ? 1.0 : std::sin(std::numbers::pi * a) / (std::numbers::pi * a);
      h[i] = 2.0 * kCutoff * sinc * w;
    }
  }

  double operator()(double t) const {
    const double u = std::fabs(t) * kTableOversample;
    const std::size_t i = static_cast<std::size_t>(u);
    if (i + 1 >= h.size()) return 0.0;
    const double frac = u - static_cast<double>(i);
    return h[i] + frac * (h[i + 1] - h[i]);
  }
};

const KernelTable& kernel_table() {
  static const KernelTable table;
  return table;
}

}  // namespace

std::vector<double> resample_channel(std::span<const double> x, int src_fs,
                                     int dst_fs) {
  if (src_fs == dst_fs) return {x.begin(), x.end()};
  const auto& table = kernel_table();

  // time scale of the prototype in input samples: 1 at equal/greater rates,
  // stretched by src/dst when downsampling
  const double g = std::min(1.0, static_cast<double>(dst_fs) / src_fs);
  const double half_width = kHalfWidth / g;
  const std::int64_t n_in = static_cast<std::int64_t>(x.size());
  const std::int64_t n_out =
      (n_in * dst_fs + src_fs / 2) / src_fs;  // duration kept within 1 sample

  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(2 * half_width + 3));
  std::vector<double> out(static_cast<std::size_t>(n_out));

  for (std::int64_t m = 0; m < n_out; ++m) {
    // center of output sample m in input-sample units, exact rational split
    const std::int64_t num = m * src_fs;
    const std::int64_t i_center = num / dst_fs;
    const double frac = static_cast<double>(num % dst_fs) / dst_fs;
    const double center = static_cast<double>(i_center) + frac;

    std::int64_t first = i_center - static_cast<std::int64_t>(half_width);
    std::int64_t last = i_center + static_cast<std::int64_t>(half_width) + 1;
    first = std::max<std::int64_t>(first, 0);
    last = std::min(last, n_in - 1);
    if (last < first) continue;

    taps.clear();
    double tap_sum = 0.0;
    for (std::int64_t i = first; i <= last; ++i) {
      const double t = (static_cast<double>(i) - center) * g;
      const double v = table(t);
      taps.push_back(v);
      tap_sum += v;
    }
    const double acc = kernels::active().dot(
        taps.data(), x.data() + first, taps.size());
    // normalize by the realized tap sum so DC gain is exactly 1
    out[static_cast<std::size_t>(m)] = tap_sum != 0.0 ? acc / tap_sum : 0.0;
  }
  return out;
}

AudioClip resample(const AudioClip& clip, int target_fs) {
  if (target_fs < 2000) throw RateTooLow("target rate below 2 kHz");
  if (clip.sample_rate <= 0) throw Error("clip has no sample rate");
  if (target_fs == clip.sample_rate) return clip;

  AudioClip out;
  out.sample_rate = target_fs;
  out.samples.reserve(clip.samples.size());
  for (const auto& ch : clip.samples) {
    out.samples.push_back(resample_channel(ch, clip.sample_rate, target_fs));
  }
  return out;
}

}  // namespace maskmark
