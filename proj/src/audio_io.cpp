#include "maskmark/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace maskmark {

void AudioClip::validate() const {
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  if (samples.empty()) throw EmptyInput("clip has no channels");
  const std::size_t n = samples[0].size();
  for (const auto& ch : samples) {
    if (ch.size() != n) throw Error("channel lengths differ");
    for (double v : ch) {
      if (!(std::fabs(v) <= 1.0))
        throw Error("sample magnitude exceeds 1");
    }
  }
}

AudioClip AudioClip::mono(std::vector<double> x, int fs) {
  AudioClip c;
  c.sample_rate = fs;
  c.samples.push_back(std::move(x));
  return c;
}

int frame_length_for(int fs) {
  if (fs < 2000) throw RateTooLow("sample rate below 2 kHz");
  const int l = 8 * static_cast<int>(std::lround(0.063 * fs / 8.0));
  return std::max(l, 16);
}

FrameSet frame_signal(std::span<const double> x, int frame_len,
                      int source_rate) {
  if (x.empty()) throw EmptyInput("cannot frame an empty signal");
  if (frame_len <= 0 || frame_len % 8 != 0)
    throw BadLength("frame length must be a positive multiple of 8");

  FrameSet out;
  out.frame_len = frame_len;
  out.source_rate = source_rate;
  const std::size_t l = static_cast<std::size_t>(frame_len);
  const std::size_t count = (x.size() + l - 1) / l;
  out.pad_len = count * l - x.size();
  out.frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    std::vector<double> frame(l, 0.0);
    const std::size_t begin = f * l;
    const std::size_t take = std::min(l, x.size() - begin);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(begin), take,
                frame.begin());
    out.frames.push_back(std::move(frame));
  }
  return out;
}

std::vector<double> deframe(const FrameSet& fs) {
  if (fs.frames.empty()) throw InvalidFrameSet("frame set is empty");
  const std::size_t l = static_cast<std::size_t>(fs.frame_len);
  for (const auto& f : fs.frames) {
    if (f.size() != l) throw InvalidFrameSet("frame length mismatch");
  }
  if (fs.pad_len >= l) throw InvalidFrameSet("padding exceeds frame length");

  std::vector<double> out;
  out.reserve(fs.frames.size() * l - fs.pad_len);
  for (const auto& f : fs.frames) {
    out.insert(out.end(), f.begin(), f.end());
  }
  out.resize(out.size() - fs.pad_len);
  return out;
}

}  // namespace maskmark
