#pragma once

#include <span>

#include "maskmark/psycho.hpp"
#include "maskmark/transforms.hpp"

namespace maskmark {

// One frame's analysis state, shared by protect/verify/analyze/metrics.
struct FrameAnalysis {
  WaveletPyramid pyramid;
  SubbandSpectrum spectrum;
  MaskingReport report;  // empty unless requested
};

class FrameAnalyzer {
 public:
  FrameAnalyzer(int fs, std::span<const int> embed_bands);
  explicit FrameAnalyzer(int fs);

  const BarkLayout& layout() const { return layout_; }
  const DctPlan& plan() const { return plan_; }
  int frame_len() const { return layout_.frame_len; }

  // transforms only
  FrameAnalysis transform(std::span<const double> frame) const;
  // transforms + masking report
  FrameAnalysis analyze(std::span<const double> frame) const;

  // inverse chain: DCT spectra (possibly modified) back to samples
  std::vector<double> reconstruct(const FrameAnalysis& a) const;

  // coefficient slot accessors for a band: slots are the band's x_c range
  // followed by its x_d range
  double coefficient(const SubbandSpectrum& s, const Band& b, int slot) const;
  void set_coefficient(SubbandSpectrum& s, const Band& b, int slot,
                       double v) const;

 private:
  BarkLayout layout_;
  DctPlan plan_;
};

}  // namespace maskmark
