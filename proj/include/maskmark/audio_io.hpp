#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maskmark/errors.hpp"

namespace maskmark {

// Sampled waveform, amplitudes in [-1, 1], one vector per channel.
struct AudioClip {
  std::vector<std::vector<double>> samples;  // [channel][n], equal lengths
  int sample_rate = 0;

  int channels() const { return static_cast<int>(samples.size()); }
  std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }
  double seconds() const {
    return sample_rate > 0 ? static_cast<double>(length()) / sample_rate : 0.0;
  }
  // Throws if rates/channel lengths are inconsistent or samples exceed [-1,1].
  void validate() const;

  static AudioClip mono(std::vector<double> x, int fs);
};

// 16-bit PCM RIFF/WAVE reader. Samples are scaled by 1/32768, so the full
// int16 range maps into [-1, 1). fmt and data chunks are required; any other
// chunks are ignored. Throws MalformedFile / UnsupportedFormat.
AudioClip read_wav(const std::string& path);

// 16-bit PCM writer: round(x * 32768), saturated to [-32768, 32767].
// Throws IoFailure.
void write_wav(const AudioClip& clip, const std::string& path);

// Constant-duration framing rule: L = 8 * round(0.063 * fs / 8), so a frame
// is always ~63 ms and the analysis resolution fs/(2L) stays ~7.94 Hz at
// every rate. Throws RateTooLow for fs < 2000.
int frame_length_for(int fs);

// Non-overlapping fixed-length segmentation of one channel; the final frame
// is zero-padded and pad_len records how much.
struct FrameSet {
  std::vector<std::vector<double>> frames;
  int frame_len = 0;
  std::size_t pad_len = 0;
  int source_rate = 0;

  std::size_t frame_count() const { return frames.size(); }
};

FrameSet frame_signal(std::span<const double> x, int frame_len, int source_rate);
// Exact inverse of frame_signal: concatenates and drops the padding.
std::vector<double> deframe(const FrameSet& fs);

// Band-limited rate conversion (Kaiser-windowed sinc, kernel >= 64 taps,
// zero phase). target_fs == sample_rate returns the clip unchanged.
AudioClip resample(const AudioClip& clip, int target_fs);
std::vector<double> resample_channel(std::span<const double> x, int src_fs,
                                     int dst_fs);

}  // namespace maskmark
