#include "maskmark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "maskmark/kernels.hpp"
#include "maskmark/pipeline.hpp"
#include "maskmark/stft.hpp"

namespace maskmark {

namespace {

constexpr double kLsdEps = 1e-10;

double capped_ratio_db(double num, double den, double floor_db, double cap_db) {
  if (den <= 0.0) return cap_db;
  if (num <= 0.0) return floor_db;
  return std::clamp(10.0 * std::log10(num / den), floor_db, cap_db);
}

}  // namespace

MetricsReport metrics(const AudioClip& original, const AudioClip& processed,
                      const ProtectionSidecar* sidecar,
                      const PseudoTimbreSource* src) {
  if (original.sample_rate != processed.sample_rate)
    throw Error("metrics requires equal sample rates");
  if (original.channels() != processed.channels())
    throw Error("metrics requires equal channel counts");

  MetricsReport rep;
  const std::size_t n = std::min(original.length(), processed.length());
  const auto& k = kernels::active();

  double sig = 0.0, err = 0.0;
  for (int ch = 0; ch < original.channels(); ++ch) {
    const auto& x = original.samples[static_cast<std::size_t>(ch)];
    const auto& y = processed.samples[static_cast<std::size_t>(ch)];
    sig += k.sum_squares(x.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - y[i];
      err += d * d;
      if (std::fabs(y[i]) >= 1.0 && std::fabs(x[i]) < 1.0)
        ++rep.clipped_samples;
    }
  }
  rep.snr_db = capped_ratio_db(sig, err, -kSnrCapDb, kSnrCapDb);

  // segmental SNR over 30 ms windows, clamped per segment
  const std::size_t seg =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::lround(0.030 * original.sample_rate)));
  double seg_sum = 0.0;
  std::size_t seg_count = 0;
  for (int ch = 0; ch < original.channels(); ++ch) {
    const auto& x = original.samples[static_cast<std::size_t>(ch)];
    const auto& y = processed.samples[static_cast<std::size_t>(ch)];
    for (std::size_t s = 0; s + seg <= n; s += seg) {
      double ps = 0.0, pe = 0.0;
      for (std::size_t i = s; i < s + seg; ++i) {
        ps += x[i] * x[i];
        const double d = x[i] - y[i];
        pe += d * d;
      }
      if (ps <= 0.0 && pe <= 0.0) continue;  // silent segment in both
      seg_sum += capped_ratio_db(ps, pe, kSegSnrFloorDb, kSnrCapDb);
      ++seg_count;
    }
  }
  rep.seg_snr_db = seg_count > 0 ? seg_sum / static_cast<double>(seg_count)
                                 : kSnrCapDb;

  // log-spectral distance over short-time magnitude spectra
  {
    const int window = Stft::window_for(original.sample_rate);
    double lsd_sum = 0.0;
    std::size_t lsd_frames = 0;
    for (int ch = 0; ch < original.channels(); ++ch) {
      std::span<const double> xs(
          original.samples[static_cast<std::size_t>(ch)].data(), n);
      std::span<const double> ys(
          processed.samples[static_cast<std::size_t>(ch)].data(), n);
      Stft sx(xs, window), sy(ys, window);
      const std::size_t frames = std::min(sx.frames(), sy.frames());
      const std::size_t bins = sx.bins();
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
          const double dx =
              20.0 * std::log10(std::abs(sx.spectrum(f)[b]) + kLsdEps);
          const double dy =
              20.0 * std::log10(std::abs(sy.spectrum(f)[b]) + kLsdEps);
          acc += (dx - dy) * (dx - dy);
        }
        lsd_sum += std::sqrt(acc / static_cast<double>(bins));
        ++lsd_frames;
      }
    }
    rep.lsd_db = lsd_frames > 0 ? lsd_sum / static_cast<double>(lsd_frames) : 0.0;
  }

  // informed measures
  if (sidecar != nullptr) {
    FrameAnalyzer analyzer(sidecar->fs, sidecar->embed_bands);
    const BarkLayout& layout = analyzer.layout();
    const std::size_t l = static_cast<std::size_t>(sidecar->frame_len);
    struct Acc {
      double sum = 0;
      double mx = -120;
      std::int64_t count = 0;
    };
    std::vector<Acc> acc(sidecar->embed_bands.size());

    const std::size_t frames =
        std::min(sidecar->embedded_frames(), n / l);
    for (int ch = 0; ch < original.channels(); ++ch) {
      const auto& x = original.samples[static_cast<std::size_t>(ch)];
      const auto& y = processed.samples[static_cast<std::size_t>(ch)];
      for (std::size_t f = 0; f < frames; ++f) {
        FrameAnalysis ax = analyzer.analyze(
            std::span<const double>(x.data() + f * l, l));
        FrameAnalysis ay = analyzer.transform(
            std::span<const double>(y.data() + f * l, l));
        for (std::size_t pos = 0; pos < sidecar->embed_bands.size(); ++pos) {
          const Band* band = layout.find(sidecar->embed_bands[pos]);
          if (band == nullptr) continue;
          const int bp = layout.position_of(band->index);
          const double tz = ax.report[static_cast<std::size_t>(bp)].threshold;
          double noise = 0.0;
          for (int i = 0; i < band->count(); ++i) {
            const double d = analyzer.coefficient(ay.spectrum, *band, i) -
                             analyzer.coefficient(ax.spectrum, *band, i);
            noise += d * d;
          }
          const double v = capped_ratio_db(noise, tz, -120.0, 120.0);
          acc[pos].sum += v;
          acc[pos].mx = std::max(acc[pos].mx, v);
          ++acc[pos].count;
        }
      }
    }
    for (std::size_t pos = 0; pos < acc.size(); ++pos) {
      BandNmrMeasure m;
      m.band_index = sidecar->embed_bands[pos];
      m.mean_nmr_db =
          acc[pos].count > 0 ? acc[pos].sum / acc[pos].count : -120.0;
      m.max_nmr_db = acc[pos].mx;
      rep.band_nmr.push_back(m);
    }

    if (src != nullptr) {
      const VerifyReport vr = verify(processed, *sidecar, *src);
      rep.band_ber = vr.bands;
      rep.overall_ber = vr.ber;
    }
  }
  return rep;
}

void write_metrics_report(std::ostream& os, const MetricsReport& m) {
  os << "snr_db " << m.snr_db << '\n';
  os << "seg_snr_db " << m.seg_snr_db << '\n';
  os << "lsd_db " << m.lsd_db << '\n';
  os << "clipped_samples " << m.clipped_samples << '\n';
  for (const auto& b : m.band_nmr)
    os << "band_nmr " << b.band_index << " mean " << b.mean_nmr_db << " max "
       << b.max_nmr_db << '\n';
  for (const auto& b : m.band_ber)
    os << "band_ber " << b.band_index << " bits " << b.bits << " errors "
       << b.errors << " ber " << b.ber << '\n';
  if (m.overall_ber >= 0) os << "ber " << m.overall_ber << '\n';
}

}  // namespace maskmark
