#pragma once

#include <cstdint>
#include <string>

#include "maskmark/audio_io.hpp"

namespace maskmark {

// Attacker-side preprocessing models. Every attack preserves duration
// (within one sample period) and returns audio at the input rate.
struct AttackSpec {
  enum class Kind { resample, denoise, additive_noise, requantize };
  Kind kind = Kind::resample;
  int target_rate = 8000;      // resample
  double beta = 1.5;           // denoise over-subtraction factor
  double gain_floor = 0.05;    // denoise spectral gain floor
  double snr_db = 20.0;        // additive noise; +inf means identity
  std::uint64_t seed = 1;      // additive noise
  int bits = 8;                // requantize depth, 4..16

  // "kind:key=value,..." e.g. "resample:rate=8000", "denoise:beta=1.5,floor=0.05",
  // "noise:snr=20,seed=7", "requantize:bits=8". Throws std::invalid_argument.
  static AttackSpec parse(const std::string& text);
  std::string describe() const;
};

// Down/up round trip through target_rate; identity when target == input rate.
AudioClip attack_resample(const AudioClip& clip, int target_rate);

// Short-time magnitude-domain spectral subtraction. Per-bin noise floor is
// the 10th percentile of frame magnitudes; gain = max(1 - beta*floor/|X|, g_min).
// beta == 0 reconstructs the input within float error.
AudioClip attack_denoise(const AudioClip& clip, double beta = 1.5,
                         double gain_floor = 0.05);

// Seeded Gaussian noise, rescaled so the realized SNR matches exactly.
AudioClip attack_noise(const AudioClip& clip, double snr_db, std::uint64_t seed);

// Uniform mid-rise requantization to the given depth (4..16 bits).
AudioClip attack_requantize(const AudioClip& clip, int bits);

AudioClip apply_attack(const AudioClip& clip, const AttackSpec& spec);

}  // namespace maskmark
