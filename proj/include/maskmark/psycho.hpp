#pragma once

#include <functional>
#include <span>
#include <vector>

#include "maskmark/transforms.hpp"

namespace maskmark {

// Absolute energy spectral density of 0 dB SPL in the DCT domain: one
// 16-bit LSB of amplitude, squared (2^-30).
inline constexpr double kSplZeroEnergy = 1.0 / (32768.0 * 32768.0);

// Energies are floored here before geometric/arithmetic means so flatness
// stays defined for silent coefficients.
inline constexpr double kFlatnessEnergyFloor = 1e-12;

// One critical band: Zwicker edges plus the DCT coefficient slots that fall
// into it. Coefficient k of x_c sits at k*fs/(2L) Hz, coefficient k of x_d
// at fs/16 + k*fs/(2L) Hz; a band owns the coefficients whose frequency lies
// in (low, high].
struct Band {
  int index = 0;  // 1-based Zwicker band number
  double low_hz = 0, high_hz = 0, center_hz = 0;
  int c_begin = 0, c_end = 0;  // [c_begin, c_end) into x_c
  int d_begin = 0, d_end = 0;  // [d_begin, d_end) into x_d

  int count() const { return (c_end - c_begin) + (d_end - d_begin); }
};

struct BarkLayout {
  int fs = 0;
  int frame_len = 0;
  double resolution_hz = 0;        // fs / (2L)
  std::vector<Band> bands;         // bands intersecting [0, fs/8] with count >= 1
  std::vector<int> embed_bands;    // requested embed bands present in `bands`
  std::vector<int> dropped_embed_bands;  // requested but empty at this (fs, L)

  const Band* find(int band_index) const;
  int position_of(int band_index) const;  // index into `bands`, -1 if absent
};

// Default embedding targets: Zwicker bands 1..7 (20..770 Hz).
std::vector<int> default_embed_bands();

// Zwicker band edges for 1 <= index <= 25; returns {index, low, high, center}.
Band zwicker_band(int index);

BarkLayout bark_layout(int fs, int frame_len);  // throws RateTooLow
BarkLayout bark_layout(int fs, int frame_len, std::span<const int> embed_bands);

// --- per-band masking quantities -------------------------------------------

struct BandMasking {
  int band_index = 0;
  int count = 0;               // I_j
  double energy = 0;           // B_j
  double sfm_db = 0;           // spectral flatness, dB <= 0
  double tonality = 0;         // alpha in [0, 1]
  double offset_db = 0;        // O_j
  double spread_energy = 0;    // C_j
  double raw_threshold = 0;    // T_j
  double ath_db_center = 0;    // T_q at band center, dB SPL
  double ath_energy = 0;       // S(j)
  double threshold = 0;        // T_z(j) = max(T_j, I_j * S(j))
  double quant_delta = 0;      // filled in by the embedder
  bool skipped = false;
};

using MaskingReport = std::vector<BandMasking>;  // aligned with layout.bands

// B_j = sum of squared DCT coefficients in band j.
std::vector<double> band_energy(const SubbandSpectrum& s, const BarkLayout& layout);

// Schroeder spreading profile in dB at a band-index distance dz (maskee
// minus masker). Upward masking falls off more slowly than downward.
double schroeder_spread_db(int dz);

// C_j = sum_i B_i * 10^(SF(j-i)/10); no renormalization after spreading.
std::vector<double> spread(std::span<const double> energies, const BarkLayout& layout);
// Same with a caller-supplied profile (test hook: identity spreading).
std::vector<double> spread_with(std::span<const double> energies,
                                const BarkLayout& layout,
                                const std::function<double(int)>& sf_db);

// 10*log10(geometric mean / arithmetic mean) of the band's floored energies.
double spectral_flatness(const SubbandSpectrum& s, const BarkLayout& layout,
                         int band_pos);

// alpha = min(SFM / -60, 1); 0 for white noise, 1 for a pure tone.
double tonality(double sfm_db);

// O_j = alpha*(14.5 + j) + (1 - alpha)*5.5  [dB]
double offset_db(double alpha, int band_index);

// T_j = C_j * 10^(-O_j/10)
double raw_threshold(double spread_energy, double offset_db);

// In-quiet hearing threshold, dB SPL:
// 3.64 f^-0.8 - 6.5 exp(-0.6 (f - 3.3)^2) + 0.001 f^4, f in kHz.
double ath_db(double hz);

// Energy of a given SPL with the kSplZeroEnergy calibration.
double spl_to_energy(double db_spl);

// T_z(j) = max(T_j, I_j * S(j)) with S(j) evaluated at the band center.
double final_threshold(double raw_t, const Band& band);

// Full per-frame chain: band_energy -> flatness/tonality -> spread ->
// offset -> raw -> final threshold. quant_delta is left 0.
MaskingReport masking_report(const SubbandSpectrum& s, const BarkLayout& layout);

}  // namespace maskmark
