#include "maskmark/psycho.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "maskmark/kernels.hpp"

namespace maskmark {

namespace {

struct BandEdges {
  double low, high, center;
};

// Zwicker critical bands, 20 Hz .. 22.05 kHz in 25 bands.
constexpr std::array<BandEdges, 25> kZwicker{{
    {20, 100, 50},       {100, 200, 150},     {200, 300, 250},
    {300, 400, 350},     {400, 510, 450},     {510, 630, 570},
    {630, 770, 700},     {770, 920, 840},     {920, 1080, 1000},
    {1080, 1270, 1170},  {1270, 1480, 1370},  {1480, 1720, 1600},
    {1720, 2000, 1850},  {2000, 2320, 2150},  {2320, 2700, 2500},
    {2700, 3150, 2900},  {3150, 3700, 3400},  {3700, 4400, 4000},
    {4400, 5300, 4800},  {5300, 6400, 5800},  {6400, 7700, 7000},
    {7700, 9500, 8500},  {9500, 12000, 10500},{12000, 15500, 13500},
    {15500, 22050, 19500},
}};

}  // namespace

std::vector<int> default_embed_bands() { return {1, 2, 3, 4, 5, 6, 7}; }

Band zwicker_band(int index) {
  if (index < 1 || index > static_cast<int>(kZwicker.size()))
    throw Error("critical band index out of range");
  const auto& e = kZwicker[static_cast<std::size_t>(index - 1)];
  Band b;
  b.index = index;
  b.low_hz = e.low;
  b.high_hz = e.high;
  b.center_hz = e.center;
  return b;
}

const Band* BarkLayout::find(int band_index) const {
  for (const auto& b : bands)
    if (b.index == band_index) return &b;
  return nullptr;
}

int BarkLayout::position_of(int band_index) const {
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (bands[i].index == band_index) return static_cast<int>(i);
  return -1;
}

BarkLayout bark_layout(int fs, int frame_len) {
  const auto def = default_embed_bands();
  return bark_layout(fs, frame_len, def);
}

BarkLayout bark_layout(int fs, int frame_len, std::span<const int> embed_bands) {
  if (fs < 2000) throw RateTooLow("sample rate below 2 kHz");
  if (frame_len <= 0 || frame_len % 8 != 0)
    throw BadLength("frame length must be a positive multiple of 8");

  BarkLayout layout;
  layout.fs = fs;
  layout.frame_len = frame_len;
  layout.resolution_hz = static_cast<double>(fs) / (2.0 * frame_len);
  const int n = frame_len / 8;
  const double res = layout.resolution_hz;
  const double d_base = fs / 16.0;

  // coefficient k of x_c sits at k*res, of x_d at fs/16 + k*res; a band owns
  // frequencies in (low, high]. x_c/x_d ranges are contiguous in k, so each
  // band reduces to two half-open index intervals.
  auto range_for = [&](double low, double high, double base) {
    // smallest k with base + k*res > low, past-the-end k with <= high
    int begin = static_cast<int>(std::floor((low - base) / res)) + 1;
    int end = static_cast<int>(std::floor((high - base) / res)) + 1;
    // guard against edge rounding
    while (begin > 0 && base + (begin - 1) * res > low) --begin;
    while (base + begin * res <= low) ++begin;
    while (end > begin && base + (end - 1) * res > high) --end;
    while (base + end * res <= high) ++end;
    begin = std::clamp(begin, 0, n);
    end = std::clamp(end, begin, n);
    return std::pair<int, int>{begin, end};
  };

  const double analysis_top = fs / 8.0;
  for (int j = 1; j <= static_cast<int>(kZwicker.size()); ++j) {
    Band b = zwicker_band(j);
    if (b.low_hz >= analysis_top) break;
    std::tie(b.c_begin, b.c_end) = range_for(b.low_hz, b.high_hz, 0.0);
    std::tie(b.d_begin, b.d_end) = range_for(b.low_hz, b.high_hz, d_base);
    if (b.count() >= 1) layout.bands.push_back(b);
  }

  for (int j : embed_bands) {
    if (layout.find(j) != nullptr)
      layout.embed_bands.push_back(j);
    else
      layout.dropped_embed_bands.push_back(j);
  }
  return layout;
}

std::vector<double> band_energy(const SubbandSpectrum& s,
                                const BarkLayout& layout) {
  const auto& k = kernels::active();
  std::vector<double> out;
  out.reserve(layout.bands.size());
  for (const auto& b : layout.bands) {
    double e = 0.0;
    if (b.c_end > b.c_begin)
      e += k.sum_squares(s.x_c.data() + b.c_begin,
                         static_cast<std::size_t>(b.c_end - b.c_begin));
    if (b.d_end > b.d_begin)
      e += k.sum_squares(s.x_d.data() + b.d_begin,
                         static_cast<std::size_t>(b.d_end - b.d_begin));
    out.push_back(e);
  }
  return out;
}

double schroeder_spread_db(int dz) {
  const double z = dz + 0.474;
  return 15.81 + 7.5 * z - 17.5 * std::sqrt(1.0 + z * z);
}

std::vector<double> spread_with(std::span<const double> energies,
                                const BarkLayout& layout,
                                const std::function<double(int)>& sf_db) {
  const std::size_t n = layout.bands.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int dz = layout.bands[j].index - layout.bands[i].index;
      acc += energies[i] * std::pow(10.0, sf_db(dz) / 10.0);
    }
    out[j] = acc;
  }
  return out;
}

std::vector<double> spread(std::span<const double> energies,
                           const BarkLayout& layout) {
  return spread_with(energies, layout, schroeder_spread_db);
}

double spectral_flatness(const SubbandSpectrum& s, const BarkLayout& layout,
                         int band_pos) {
  const Band& b = layout.bands.at(static_cast<std::size_t>(band_pos));
  double log_sum = 0.0;
  double sum = 0.0;
  int count = 0;
  auto accumulate = [&](const std::vector<double>& v, int begin, int end) {
    for (int k = begin; k < end; ++k) {
      const double e = std::max(v[static_cast<std::size_t>(k)] *
                                    v[static_cast<std::size_t>(k)],
                                kFlatnessEnergyFloor);
      log_sum += std::log(e);
      sum += e;
      ++count;
    }
  };
  accumulate(s.x_c, b.c_begin, b.c_end);
  accumulate(s.x_d, b.d_begin, b.d_end);
  if (count == 0) return 0.0;
  const double geo = std::exp(log_sum / count);
  const double arith = sum / count;
  return std::min(0.0, 10.0 * std::log10(geo / arith));
}

double tonality(double sfm_db) {
  return std::clamp(sfm_db / -60.0, 0.0, 1.0);
}

double offset_db(double alpha, int band_index) {
  return alpha * (14.5 + band_index) + (1.0 - alpha) * 5.5;
}

double raw_threshold(double spread_energy, double offset_db) {
  if (spread_energy <= 0.0) return 0.0;
  return spread_energy * std::pow(10.0, -offset_db / 10.0);
}

double ath_db(double hz) {
  if (hz <= 0.0) throw Error("ath_db requires a positive frequency");
  const double f = hz / 1000.0;
  const double aq = 6.5 * std::exp(-0.6 * (f - 3.3) * (f - 3.3));
  return 3.64 * std::pow(f, -0.8) - aq + 0.001 * f * f * f * f;
}

double spl_to_energy(double db_spl) {
  return kSplZeroEnergy * std::pow(10.0, db_spl / 10.0);
}

double final_threshold(double raw_t, const Band& band) {
  const double floor = band.count() * spl_to_energy(ath_db(band.center_hz));
  return std::max(raw_t, floor);
}

MaskingReport masking_report(const SubbandSpectrum& s, const BarkLayout& layout) {
  const std::vector<double> energies = band_energy(s, layout);
  const std::vector<double> c = spread(energies, layout);

  MaskingReport report;
  report.reserve(layout.bands.size());
  for (std::size_t i = 0; i < layout.bands.size(); ++i) {
    const Band& b = layout.bands[i];
    BandMasking m;
    m.band_index = b.index;
    m.count = b.count();
    m.energy = energies[i];
    m.sfm_db = spectral_flatness(s, layout, static_cast<int>(i));
    m.tonality = tonality(m.sfm_db);
    m.offset_db = offset_db(m.tonality, b.index);
    m.spread_energy = c[i];
    m.raw_threshold = raw_threshold(c[i], m.offset_db);
    m.ath_db_center = ath_db(b.center_hz);
    m.ath_energy = spl_to_energy(m.ath_db_center);
    m.threshold = final_threshold(m.raw_threshold, b);
    report.push_back(m);
  }
  return report;
}

}  // namespace maskmark
