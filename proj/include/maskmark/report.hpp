#pragma once

#include <iosfwd>

#include "maskmark/audio_io.hpp"
#include "maskmark/embed.hpp"

namespace maskmark {

// Line-oriented masking analysis export, one row per (channel, frame, band).
// Columns: channel frame band count energy sfm_db alpha offset_db spread
// raw_threshold ath_db ath_energy threshold delta skipped
// delta is filled for embed bands using cfg's NMR limit, 0 elsewhere.
// Row count = channels x frames x bands (the padded final frame included).
void write_analysis_report(std::ostream& os, const AudioClip& clip,
                           const EmbedConfig& cfg = {});

}  // namespace maskmark
