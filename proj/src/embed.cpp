#include "maskmark/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "maskmark/kernels.hpp"
#include "maskmark/pipeline.hpp"

namespace maskmark {

double quant_step(double threshold, int count, double nmr_limit_db) {
  if (count < 1) throw SkippedBand("band has no coefficients");
  if (!(threshold > 0.0)) throw SkippedBand("nonpositive masking threshold");
  return std::sqrt(std::pow(10.0, nmr_limit_db / 10.0) * threshold / count);
}

double qim_embed(double x, int bit, double delta) {
  const double q = 2.0 * delta;
  const double dither = bit ? delta : 0.0;
  return std::nearbyint((x - dither) / q) * q + dither;
}

int qim_extract(double y, double delta) {
  const double q = 2.0 * delta;
  const double r0 = std::fabs(y - std::nearbyint(y / q) * q);
  const double r1 = std::fabs(y - (std::nearbyint((y - delta) / q) * q + delta));
  return r1 < r0 ? 1 : 0;  // ties decode as 0
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PseudoTimbreSource PseudoTimbreSource::keyed(std::uint64_t key) {
  PseudoTimbreSource s;
  s.mode = TimbreMode::keyed;
  s.key = key;
  return s;
}

PseudoTimbreSource PseudoTimbreSource::from_decoy(AudioClip decoy) {
  PseudoTimbreSource s;
  s.mode = TimbreMode::decoy;
  s.decoy = std::make_shared<AudioClip>(std::move(decoy));
  return s;
}

namespace {

inline int keyed_bit(std::uint64_t key, int frame, int band, int slot) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(slot));
  h = mix64(static_cast<std::uint64_t>(band) ^ h);
  h = mix64(static_cast<std::uint64_t>(frame) ^ h);
  h = mix64(key ^ h);
  return static_cast<int>(h >> 63);
}

// Lazily framed + transformed decoy, resampled to the host rate if needed.
// Bits are the coefficient sign bits at the same (frame, band, slot).
class DecoyBits {
 public:
  DecoyBits(const AudioClip& decoy, const FrameAnalyzer& analyzer, int host_fs,
            int host_channel)
      : analyzer_(analyzer) {
    const AudioClip* src = &decoy;
    AudioClip converted;
    if (decoy.sample_rate != host_fs) {
      converted = resample(decoy, host_fs);
      src = &converted;
    }
    const int ch =
        std::min(host_channel, std::max(0, src->channels() - 1));
    channel_ = src->samples[static_cast<std::size_t>(ch)];
  }

  std::uint8_t bit(int frame, const Band& band, int slot) {
    ensure_frame(frame);
    const double v = analyzer_.coefficient(*spectrum_, band, slot);
    return std::signbit(v) ? 1 : 0;
  }

 private:
  void ensure_frame(int frame) {
    if (frame == cached_frame_) return;
    const std::size_t l = static_cast<std::size_t>(analyzer_.frame_len());
    const std::size_t begin = static_cast<std::size_t>(frame) * l;
    if (begin + l > channel_.size())
      throw DecoyTooShort("decoy audio ends before the host does");
    analysis_ = analyzer_.transform(
        std::span<const double>(channel_.data() + begin, l));
    spectrum_ = &analysis_.spectrum;
    cached_frame_ = frame;
  }

  const FrameAnalyzer& analyzer_;
  std::vector<double> channel_;
  FrameAnalysis analysis_;
  const SubbandSpectrum* spectrum_ = nullptr;
  int cached_frame_ = -1;
};

}  // namespace

std::vector<std::uint8_t> pseudo_bits(const PseudoTimbreSource& src,
                                      const BarkLayout& layout, int frame,
                                      int band_index, int count) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
  if (src.mode == TimbreMode::keyed) {
    for (int i = 0; i < count; ++i)
      bits[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(keyed_bit(src.key, frame, band_index, i));
    return bits;
  }
  if (!src.decoy) throw Error("decoy mode without decoy audio");
  FrameAnalyzer analyzer(layout.fs, layout.embed_bands);
  DecoyBits decoy(*src.decoy, analyzer, layout.fs, 0);
  const Band* band = layout.find(band_index);
  if (band == nullptr) throw Error("band not present in layout");
  for (int i = 0; i < count; ++i)
    bits[static_cast<std::size_t>(i)] = decoy.bit(frame, *band, i);
  return bits;
}

// --- protect ----------------------------------------------------------------

namespace {

constexpr double kNmrFloorDb = -120.0;

struct BandAccumulator {
  std::int64_t embedded = 0;
  std::int64_t bits = 0;
  double nmr_sum = 0;
  double nmr_max = kNmrFloorDb;
};

double nmr_db(double emax, int count, double threshold) {
  const double noise = count * emax * emax;
  if (noise <= 0.0 || threshold <= 0.0) return kNmrFloorDb;
  return std::max(kNmrFloorDb, 10.0 * std::log10(noise / threshold));
}

}  // namespace

ProtectResult protect(const AudioClip& clip, const PseudoTimbreSource& src,
                      const EmbedConfig& cfg) {
  clip.validate();
  if (!(cfg.nmr_limit_db < 0.0)) throw Error("NMR limit must be negative");
  if (clip.length() == 0) throw EmptyInput("clip has no samples");

  FrameAnalyzer analyzer(clip.sample_rate, cfg.embed_bands);
  const BarkLayout& layout = analyzer.layout();
  const int l = analyzer.frame_len();
  const std::size_t n = clip.length();
  const std::size_t full_frames = n / static_cast<std::size_t>(l);

  ProtectResult result;
  result.audio.sample_rate = clip.sample_rate;
  result.audio.samples = clip.samples;  // partial tail stays untouched

  auto& sc = result.sidecar;
  sc.fs = clip.sample_rate;
  sc.channels = clip.channels();
  sc.length = static_cast<std::int64_t>(n);
  sc.frame_len = l;
  sc.embed_bands = layout.embed_bands;
  sc.mode = src.mode;
  sc.key = src.mode == TimbreMode::keyed ? src.key : 0;
  sc.nmr_limit_db = cfg.nmr_limit_db;
  sc.entries.assign(
      static_cast<std::size_t>(clip.channels()),
      std::vector<std::vector<SidecarEntry>>(
          full_frames, std::vector<SidecarEntry>(layout.embed_bands.size())));

  std::vector<BandAccumulator> acc(layout.embed_bands.size());
  std::vector<std::uint8_t> bits;
  std::vector<double> coeffs;
  double nmr_sum = 0;
  std::int64_t nmr_count = 0;

  for (int ch = 0; ch < clip.channels(); ++ch) {
    std::unique_ptr<DecoyBits> decoy;
    if (src.mode == TimbreMode::decoy) {
      if (!src.decoy) throw Error("decoy mode without decoy audio");
      decoy = std::make_unique<DecoyBits>(*src.decoy, analyzer,
                                          clip.sample_rate, ch);
    }
    auto& channel = result.audio.samples[static_cast<std::size_t>(ch)];
    for (std::size_t f = 0; f < full_frames; ++f) {
      double* frame_ptr = channel.data() + f * static_cast<std::size_t>(l);
      FrameAnalysis a = analyzer.analyze(
          std::span<const double>(frame_ptr, static_cast<std::size_t>(l)));

      bool touched = false;
      for (std::size_t pos = 0; pos < layout.embed_bands.size(); ++pos) {
        const Band& band = *layout.find(layout.embed_bands[pos]);
        const int band_pos = layout.position_of(band.index);
        BandMasking& m = a.report[static_cast<std::size_t>(band_pos)];
        auto& entry = sc.entries[static_cast<std::size_t>(ch)][f][pos];

        if (band.count() < 1 || m.threshold <= 0.0 ||
            m.threshold < cfg.skip_floor) {
          m.skipped = true;
          entry.skipped = true;
          ++result.stats.skipped_bands;
          continue;
        }

        const double delta =
            quant_step(m.threshold, band.count(), cfg.nmr_limit_db);
        m.quant_delta = delta;
        entry.delta = delta;
        entry.skipped = false;

        const int count = band.count();
        bits.resize(static_cast<std::size_t>(count));
        if (src.mode == TimbreMode::keyed) {
          for (int i = 0; i < count; ++i)
            bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
                keyed_bit(src.key, static_cast<int>(f), band.index, i));
        } else {
          for (int i = 0; i < count; ++i)
            bits[static_cast<std::size_t>(i)] =
                decoy->bit(static_cast<int>(f), band, i);
        }

        coeffs.resize(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
          coeffs[static_cast<std::size_t>(i)] =
              analyzer.coefficient(a.spectrum, band, i);

        std::vector<double> before = coeffs;
        kernels::active().qim_embed_span(coeffs.data(),
                                         static_cast<std::size_t>(count),
                                         bits.data(), delta);
        double emax = 0.0;
        for (int i = 0; i < count; ++i) {
          emax = std::max(emax, std::fabs(coeffs[static_cast<std::size_t>(i)] -
                                          before[static_cast<std::size_t>(i)]));
          analyzer.set_coefficient(a.spectrum, band, i,
                                   coeffs[static_cast<std::size_t>(i)]);
        }

        const double band_nmr = nmr_db(emax, count, m.threshold);
        auto& ba = acc[pos];
        ba.embedded += 1;
        ba.bits += count;
        ba.nmr_sum += band_nmr;
        ba.nmr_max = std::max(ba.nmr_max, band_nmr);
        nmr_sum += band_nmr;
        ++nmr_count;
        result.stats.embedded_bands += 1;
        result.stats.total_bits += count;
        touched = true;
      }

      if (touched) {
        const std::vector<double> rebuilt = analyzer.reconstruct(a);
        for (int i = 0; i < l; ++i) {
          double v = rebuilt[static_cast<std::size_t>(i)];
          if (cfg.clip_output && std::fabs(v) > 1.0) {
            v = std::clamp(v, -1.0, 1.0);
            ++result.stats.clipped_samples;
          }
          frame_ptr[i] = v;
        }
      }
    }
  }

  result.stats.full_frames = static_cast<std::int64_t>(full_frames);
  result.stats.all_skipped = result.stats.embedded_bands == 0;
  result.stats.mean_nmr_db =
      nmr_count > 0 ? nmr_sum / static_cast<double>(nmr_count) : kNmrFloorDb;
  result.stats.max_nmr_db = kNmrFloorDb;
  for (std::size_t pos = 0; pos < acc.size(); ++pos) {
    BandNmrStat stat;
    stat.band_index = layout.embed_bands[pos];
    stat.embedded = acc[pos].embedded;
    stat.bits = acc[pos].bits;
    stat.mean_nmr_db = acc[pos].embedded > 0
                           ? acc[pos].nmr_sum / acc[pos].embedded
                           : kNmrFloorDb;
    stat.max_nmr_db = acc[pos].nmr_max;
    result.stats.max_nmr_db =
        std::max(result.stats.max_nmr_db, acc[pos].nmr_max);
    result.stats.per_band.push_back(stat);
  }
  return result;
}

// --- verify -----------------------------------------------------------------

VerifyReport verify(const AudioClip& clip, const ProtectionSidecar& sidecar,
                    const PseudoTimbreSource& src) {
  if (clip.sample_rate != sidecar.fs)
    throw SidecarMismatch("sample rate differs from sidecar");
  if (clip.channels() != sidecar.channels)
    throw SidecarMismatch("channel count differs from sidecar");
  const std::int64_t len = static_cast<std::int64_t>(clip.length());
  if (std::llabs(len - sidecar.length) > sidecar.frame_len)
    throw SidecarMismatch("length differs from sidecar by more than a frame");

  FrameAnalyzer analyzer(sidecar.fs, sidecar.embed_bands);
  if (analyzer.frame_len() != sidecar.frame_len)
    throw SidecarMismatch("frame length disagrees with this build");
  const BarkLayout& layout = analyzer.layout();
  const std::size_t l = static_cast<std::size_t>(sidecar.frame_len);

  VerifyReport report;
  report.bands.resize(sidecar.embed_bands.size());
  for (std::size_t pos = 0; pos < sidecar.embed_bands.size(); ++pos)
    report.bands[pos].band_index = sidecar.embed_bands[pos];

  std::vector<double> padded;
  for (int ch = 0; ch < sidecar.channels; ++ch) {
    const auto& channel = clip.samples[static_cast<std::size_t>(ch)];
    padded.assign(static_cast<std::size_t>(sidecar.length), 0.0);
    std::copy_n(channel.begin(),
                std::min(channel.size(), padded.size()), padded.begin());

    std::unique_ptr<DecoyBits> decoy;
    if (src.mode == TimbreMode::decoy) {
      if (!src.decoy) throw Error("decoy mode without decoy audio");
      decoy = std::make_unique<DecoyBits>(*src.decoy, analyzer, sidecar.fs, ch);
    }

    const auto& frames = sidecar.entries[static_cast<std::size_t>(ch)];
    for (std::size_t f = 0; f < frames.size(); ++f) {
      FrameAnalysis a = analyzer.transform(
          std::span<const double>(padded.data() + f * l, l));
      for (std::size_t pos = 0; pos < sidecar.embed_bands.size(); ++pos) {
        const SidecarEntry& entry = frames[f][pos];
        if (entry.skipped) continue;
        const Band* band = layout.find(sidecar.embed_bands[pos]);
        if (band == nullptr)
          throw SidecarMismatch("sidecar band missing from layout");
        for (int i = 0; i < band->count(); ++i) {
          const double y = analyzer.coefficient(a.spectrum, *band, i);
          const int got = qim_extract(y, entry.delta);
          int want;
          if (src.mode == TimbreMode::keyed) {
            want = keyed_bit(src.key, static_cast<int>(f), band->index, i);
          } else {
            want = decoy->bit(static_cast<int>(f), *band, i);
          }
          auto& b = report.bands[pos];
          b.bits += 1;
          b.errors += (got != want);
        }
      }
    }
  }

  for (auto& b : report.bands) {
    b.ber = b.bits > 0 ? static_cast<double>(b.errors) / b.bits : 0.0;
    report.bits += b.bits;
    report.errors += b.errors;
  }
  report.ber =
      report.bits > 0 ? static_cast<double>(report.errors) / report.bits : 0.0;
  return report;
}

}  // namespace maskmark
