#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maskmark/audio_io.hpp"
#include "maskmark/psycho.hpp"

namespace maskmark {

// --- QIM primitives ---------------------------------------------------------

// Adaptive half-step from the band threshold: delta = sqrt(10^(nmr/10) * Tz / I).
// By construction 10*log10(I * delta^2 / Tz) == nmr_limit_db exactly.
// Throws SkippedBand when Tz <= 0 or count < 1.
double quant_step(double threshold, int count, double nmr_limit_db);

// Binary dither modulation with step q = 2*delta: coset 0 sits on multiples
// of q, coset 1 is offset by q/2. |embed(x) - x| <= delta always.
double qim_embed(double x, int bit, double delta);

// Minimum-distance decoding; an exact tie (both residuals delta/2) decodes 0.
int qim_extract(double y, double delta);

// --- decoy bitstream --------------------------------------------------------

enum class TimbreMode { keyed, decoy };

// Where embedded bits come from. keyed: a splitmix64-style mix of
// (key, frame, band, slot) - reproducible from the key alone. decoy: the
// sign bit (negative -> 1) of a decoy clip's DCT coefficient at the same
// (frame, band, slot), with the decoy framed and transformed like the host.
struct PseudoTimbreSource {
  TimbreMode mode = TimbreMode::keyed;
  std::uint64_t key = 0;
  std::shared_ptr<const AudioClip> decoy;

  static PseudoTimbreSource keyed(std::uint64_t key);
  static PseudoTimbreSource from_decoy(AudioClip decoy);
};

std::uint64_t mix64(std::uint64_t z);

// Bits for one (frame, band) run of `count` coefficient slots. Decoy mode
// retransforms the decoy frame on every call; the embedder caches instead.
// Throws DecoyTooShort when the decoy has no full frame at `frame`.
std::vector<std::uint8_t> pseudo_bits(const PseudoTimbreSource& src,
                                      const BarkLayout& layout, int frame,
                                      int band_index, int count);

// --- protection -------------------------------------------------------------

struct EmbedConfig {
  double nmr_limit_db = -5.0;      // must be < 0
  std::vector<int> embed_bands = default_embed_bands();
  double skip_floor = 0.0;         // skip bands with Tz below this energy
  bool clip_output = true;         // clamp reconstructed samples to [-1, 1]
};

struct SidecarEntry {
  double delta = 0;
  bool skipped = true;
};

// Everything informed verification needs; the decoy audio itself is never
// stored. entries[ch][frame][pos] where pos indexes embed_bands.
struct ProtectionSidecar {
  int version = 1;
  int fs = 0;
  int channels = 0;
  std::int64_t length = 0;   // samples per channel of the protected clip
  int frame_len = 0;
  std::vector<int> embed_bands;
  TimbreMode mode = TimbreMode::keyed;
  std::uint64_t key = 0;
  double nmr_limit_db = -5.0;
  std::vector<std::vector<std::vector<SidecarEntry>>> entries;

  std::size_t embedded_frames() const {
    return entries.empty() ? 0 : entries[0].size();
  }

  void save(const std::string& path) const;       // throws IoFailure
  static ProtectionSidecar load(const std::string& path);
};

struct BandNmrStat {
  int band_index = 0;
  std::int64_t embedded = 0;     // (frame, channel) pairs embedded
  std::int64_t bits = 0;
  double mean_nmr_db = 0;        // of 10*log10(I*emax^2/Tz), floored at -120
  double max_nmr_db = -120;
};

struct ProtectStats {
  std::int64_t full_frames = 0;       // embedded frames per channel
  std::int64_t embedded_bands = 0;
  std::int64_t skipped_bands = 0;
  std::int64_t total_bits = 0;
  std::int64_t clipped_samples = 0;
  double mean_nmr_db = 0;
  double max_nmr_db = -120;
  bool all_skipped = false;           // silent-input warning
  std::vector<BandNmrStat> per_band;
};

struct ProtectResult {
  AudioClip audio;
  ProtectionSidecar sidecar;
  ProtectStats stats;
};

// Per full frame and embed band: analyze, derive delta from the masking
// threshold, QIM-embed the decoy bits into that band's coefficients, and
// reconstruct. A trailing partial frame passes through untouched (it cannot
// be re-framed consistently after the padding is dropped); its bands are
// not recorded. Output length and channel count match the input.
ProtectResult protect(const AudioClip& clip, const PseudoTimbreSource& src,
                      const EmbedConfig& cfg = {});

struct BandBer {
  int band_index = 0;
  std::int64_t bits = 0;
  std::int64_t errors = 0;
  double ber = 0;
};

struct VerifyReport {
  std::vector<BandBer> bands;
  std::int64_t bits = 0;
  std::int64_t errors = 0;
  double ber = 0;
};

// Re-runs the analysis transform, extracts bits with the sidecar's deltas and
// compares against the regenerated bitstream. The clip may be up to one frame
// shorter/longer than the sidecar records (attacks trim edges); larger
// differences, rate or channel mismatches throw SidecarMismatch.
VerifyReport verify(const AudioClip& clip, const ProtectionSidecar& sidecar,
                    const PseudoTimbreSource& src);

}  // namespace maskmark
