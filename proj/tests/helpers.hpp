#pragma once

// Shared test utilities: a deterministic speech-like corpus generator and
// small spectral probes. Test-only code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "maskmark/audio_io.hpp"

namespace testutil {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct SpeechParams {
  double f0 = 130.0;
  double seconds = 2.5;
  double pause_fraction = 0.15;  // coverage of near-silent gaps
  double pause_gain = 0.01;
  double am_floor = 0.35;
  double sibilance = 0.10;
  double noise_bed_db = -60.0;
  double peak = 0.45;
};

// Voiced harmonic stack with formant envelope, syllabic amplitude
// modulation, near-silent pauses, a high-passed sibilance component and a
// low noise bed. Deterministic for a given (seed, fs, params).
inline std::vector<double> synth_speech(std::uint64_t seed, int fs,
                                        const SpeechParams& p = {}) {
  Rng rng(seed);
  const std::size_t n = static_cast<std::size_t>(fs * p.seconds);
  std::vector<double> x(n, 0.0);

  const double ph1 = rng.uniform(0, 6), ph2 = rng.uniform(0, 6);
  std::vector<double> phase(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 =
        p.f0 * (1.0 + 0.10 * std::sin(2 * std::numbers::pi * 0.37 * t + ph1) +
                0.05 * std::sin(2 * std::numbers::pi * 1.1 * t + ph2));
    acc += 2.0 * std::numbers::pi * f0 / fs;
    phase[i] = acc;
  }

  struct Formant {
    double fc, bw;
  };
  const Formant formants[3] = {{rng.uniform(420, 700), 110},
                               {rng.uniform(1100, 1900), 220},
                               {rng.uniform(2300, 2900), 320}};
  const double fmax = std::min(5500.0, 0.45 * fs);
  const int harmonics = static_cast<int>(fmax / p.f0);
  for (int h = 1; h <= harmonics; ++h) {
    double amp = 0.03;
    for (const auto& fm : formants) {
      const double d = (h * p.f0 - fm.fc) / (2.2 * fm.bw);
      amp += std::exp(-0.5 * d * d);
    }
    amp /= std::pow(h, 0.4);
    const double hp = rng.uniform(0, 6);
    for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(h * phase[i] + hp);
  }

  const double am_rate = rng.uniform(2.8, 4.2), am_phase = rng.uniform(0, 6);
  std::vector<double> am(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double s =
        0.5 + 0.5 * std::sin(2 * std::numbers::pi * am_rate * t + am_phase);
    am[i] = p.am_floor + (1.0 - p.am_floor) * std::pow(s, 1.2);
    x[i] *= am[i];
  }

  if (p.sibilance > 0) {
    std::vector<double> noise(n + 2);
    for (auto& v : noise) v = rng.normal();
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double hpv = noise[i + 2] - 2 * noise[i + 1] + noise[i];
      var += hpv * hpv;
    }
    const double scale = p.sibilance / std::sqrt(var / n);
    for (std::size_t i = 0; i < n; ++i) {
      const double hpv = noise[i + 2] - 2 * noise[i + 1] + noise[i];
      x[i] += scale * hpv * (0.3 + 0.7 * am[i]);
    }
  }

  if (p.pause_fraction > 0) {
    std::vector<double> env(n, 1.0);
    std::size_t covered = 0;
    const std::size_t target =
        static_cast<std::size_t>(p.pause_fraction * static_cast<double>(n));
    int guard = 0;
    while (covered < target && ++guard < 64) {
      const std::size_t plen = static_cast<std::size_t>(
          rng.uniform(fs / 12.0, fs / 5.0));
      if (plen + 1 >= n) break;
      const std::size_t p0 = static_cast<std::size_t>(
          rng.uniform(0.0, static_cast<double>(n - plen - 1)));
      const std::size_t ramp = std::max<std::size_t>(1, fs / 200);
      for (std::size_t i = 0; i < plen; ++i) {
        double g = p.pause_gain;
        if (i < ramp)
          g = 1.0 + (p.pause_gain - 1.0) * static_cast<double>(i) / ramp;
        else if (plen - 1 - i < ramp)
          g = 1.0 + (p.pause_gain - 1.0) * static_cast<double>(plen - 1 - i) / ramp;
        env[p0 + i] = std::min(env[p0 + i], g);
      }
      covered += plen;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] *= env[i];
  }

  const double bed = std::pow(10.0, p.noise_bed_db / 20.0);
  for (std::size_t i = 0; i < n; ++i) x[i] += bed * rng.normal();

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::fabs(v));
  if (peak > 0) {
    const double s = p.peak / peak;
    for (auto& v : x) v *= s;
  }
  return x;
}

inline maskmark::AudioClip speech_clip(std::uint64_t seed, int fs,
                                       const SpeechParams& p = {}) {
  return maskmark::AudioClip::mono(synth_speech(seed, fs, p), fs);
}

// Amplitude of the component at frequency f (Hann-windowed projection).
inline double tone_amplitude(std::span<const double> x, int fs, double f) {
  const std::size_t n = x.size();
  double re = 0, im = 0, wsum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    const double a = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
    re += x[i] * w * std::cos(a);
    im += x[i] * w * std::sin(a);
    wsum += w;
  }
  return 2.0 * std::sqrt(re * re + im * im) / wsum;
}

// Largest component amplitude over a frequency grid, skipping +-exclude_hz
// around `exclude`.
inline double max_offtone_amplitude(std::span<const double> x, int fs,
                                    double exclude, double exclude_hz,
                                    double grid_hz = 5.0) {
  double worst = 0.0;
  for (double f = grid_hz; f < fs / 2.0 - grid_hz; f += grid_hz) {
    if (std::fabs(f - exclude) < exclude_hz) continue;
    worst = std::max(worst, tone_amplitude(x, fs, f));
  }
  return worst;
}

inline std::vector<double> sine(int fs, double f, double amp, double seconds,
                                double phase = 0.0) {
  const std::size_t n = static_cast<std::size_t>(fs * seconds);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) /
                              fs +
                          phase);
  return x;
}

}  // namespace testutil
