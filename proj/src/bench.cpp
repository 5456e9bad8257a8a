#include "maskmark/bench.hpp"

#include <chrono>

namespace maskmark {

BenchResult bench_protect(const std::vector<std::string>& wav_paths,
                          const PseudoTimbreSource& src,
                          const EmbedConfig& cfg) {
  if (wav_paths.empty()) throw EmptyInput("no input files to benchmark");

  BenchResult r;
  std::int64_t total_samples = 0;
  double wall = 0.0;
  for (const auto& path : wav_paths) {
    const AudioClip clip = read_wav(path);
    const auto t0 = std::chrono::steady_clock::now();
    const ProtectResult res = protect(clip, src, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    (void)res;
    wall += std::chrono::duration<double>(t1 - t0).count();
    r.audio_seconds += clip.seconds();
    total_samples +=
        static_cast<std::int64_t>(clip.length()) * clip.channels();
    ++r.files;
  }
  r.wall_seconds = wall;
  r.realtime_factor = wall > 0.0 ? r.audio_seconds / wall : 0.0;
  r.ns_per_sample =
      total_samples > 0 ? wall * 1e9 / static_cast<double>(total_samples) : 0.0;
  return r;
}

}  // namespace maskmark
