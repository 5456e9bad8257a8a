#pragma once

#include <iosfwd>
#include <vector>

#include "maskmark/audio_io.hpp"
#include "maskmark/embed.hpp"

namespace maskmark {

inline constexpr double kSnrCapDb = 120.0;
inline constexpr double kSegSnrFloorDb = -50.0;

struct BandNmrMeasure {
  int band_index = 0;
  double mean_nmr_db = 0;  // 10*log10(band error energy / Tz), frame mean
  double max_nmr_db = -120;
};

struct MetricsReport {
  // snr is asymmetric in (original, processed); lsd is symmetric
  double snr_db = 0;       // 10*log10(sum x^2 / sum (x-y)^2), capped at 120
  double seg_snr_db = 0;   // 30 ms segments, each clamped to [-50, 120], mean
  double lsd_db = 0;       // log-spectral distance over short-time spectra
  std::int64_t clipped_samples = 0;  // |y| >= 1 while |x| < 1
  std::vector<BandNmrMeasure> band_nmr;  // present when a sidecar is given
  std::vector<BandBer> band_ber;         // ditto (needs the bit source too)
  double overall_ber = -1;               // -1 when not computed
};

// Quality/robustness measures between an original and a processed clip of
// equal rate and length (within one frame; the shorter length is used).
// With a sidecar, adds per-band noise-to-mask ratios; with a bit source as
// well, adds bit error rates via verify().
MetricsReport metrics(const AudioClip& original, const AudioClip& processed,
                      const ProtectionSidecar* sidecar = nullptr,
                      const PseudoTimbreSource* src = nullptr);

void write_metrics_report(std::ostream& os, const MetricsReport& m);

}  // namespace maskmark
