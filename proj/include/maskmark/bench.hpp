#pragma once

#include <string>
#include <vector>

#include "maskmark/embed.hpp"

namespace maskmark {

struct BenchResult {
  int files = 0;
  double audio_seconds = 0;
  double wall_seconds = 0;
  double realtime_factor = 0;       // audio seconds per wall second
  double ns_per_sample = 0;
};

// Times protect() over the given WAVs (file IO excluded from the clock).
BenchResult bench_protect(const std::vector<std::string>& wav_paths,
                          const PseudoTimbreSource& src,
                          const EmbedConfig& cfg = {});

}  // namespace maskmark
