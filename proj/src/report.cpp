#include "maskmark/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "maskmark/pipeline.hpp"

namespace maskmark {

void write_analysis_report(std::ostream& os, const AudioClip& clip,
                           const EmbedConfig& cfg) {
  clip.validate();
  FrameAnalyzer analyzer(clip.sample_rate, cfg.embed_bands);
  const BarkLayout& layout = analyzer.layout();

  os << "# maskmark analysis 1\n";
  os << "# fs " << clip.sample_rate << " frame_len " << layout.frame_len
     << " channels " << clip.channels() << " bands " << layout.bands.size()
     << '\n';
  os << "# columns: channel frame band count energy sfm_db alpha offset_db "
        "spread raw_threshold ath_db ath_energy threshold delta skipped\n";

  char buf[512];
  for (int ch = 0; ch < clip.channels(); ++ch) {
    const FrameSet frames = frame_signal(
        clip.samples[static_cast<std::size_t>(ch)], layout.frame_len,
        clip.sample_rate);
    for (std::size_t f = 0; f < frames.frame_count(); ++f) {
      FrameAnalysis a = analyzer.analyze(frames.frames[f]);
      for (const BandMasking& m : a.report) {
        double delta = 0.0;
        bool skipped = true;
        const bool embed =
            std::find(layout.embed_bands.begin(), layout.embed_bands.end(),
                      m.band_index) != layout.embed_bands.end();
        if (embed && m.threshold > 0.0 && m.threshold >= cfg.skip_floor &&
            m.count >= 1) {
          delta = quant_step(m.threshold, m.count, cfg.nmr_limit_db);
          skipped = false;
        }
        std::snprintf(buf, sizeof buf,
                      "%d %zu %d %d %.9e %.4f %.6f %.4f %.9e %.9e %.4f %.9e "
                      "%.9e %.9e %d\n",
                      ch, f, m.band_index, m.count, m.energy, m.sfm_db,
                      m.tonality, m.offset_db, m.spread_energy,
                      m.raw_threshold, m.ath_db_center, m.ath_energy,
                      m.threshold, delta, skipped ? 1 : 0);
        os << buf;
      }
    }
  }
}

}  // namespace maskmark
