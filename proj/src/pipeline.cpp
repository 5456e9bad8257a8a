#include "maskmark/pipeline.hpp"

#include "maskmark/audio_io.hpp"

namespace maskmark {

FrameAnalyzer::FrameAnalyzer(int fs, std::span<const int> embed_bands)
    : layout_(bark_layout(fs, frame_length_for(fs), embed_bands)),
      plan_(layout_.frame_len / 8) {}

FrameAnalyzer::FrameAnalyzer(int fs)
    : layout_(bark_layout(fs, frame_length_for(fs))),
      plan_(layout_.frame_len / 8) {}

FrameAnalysis FrameAnalyzer::transform(std::span<const double> frame) const {
  FrameAnalysis a;
  a.pyramid = dwt3(frame);
  a.spectrum = subband_spectrum(a.pyramid, plan_);
  return a;
}

FrameAnalysis FrameAnalyzer::analyze(std::span<const double> frame) const {
  FrameAnalysis a = transform(frame);
  a.report = masking_report(a.spectrum, layout_);
  return a;
}

std::vector<double> FrameAnalyzer::reconstruct(const FrameAnalysis& a) const {
  WaveletPyramid p;
  p.c3.resize(a.spectrum.x_c.size());
  p.d3.resize(a.spectrum.x_d.size());
  plan_.inverse(a.spectrum.x_c, p.c3);
  plan_.inverse(a.spectrum.x_d, p.d3);
  p.d2 = a.pyramid.d2;
  p.d1 = a.pyramid.d1;
  return idwt3(p);
}

double FrameAnalyzer::coefficient(const SubbandSpectrum& s, const Band& b,
                                  int slot) const {
  const int nc = b.c_end - b.c_begin;
  if (slot < nc) return s.x_c[static_cast<std::size_t>(b.c_begin + slot)];
  return s.x_d[static_cast<std::size_t>(b.d_begin + (slot - nc))];
}

void FrameAnalyzer::set_coefficient(SubbandSpectrum& s, const Band& b, int slot,
                                    double v) const {
  const int nc = b.c_end - b.c_begin;
  if (slot < nc)
    s.x_c[static_cast<std::size_t>(b.c_begin + slot)] = v;
  else
    s.x_d[static_cast<std::size_t>(b.d_begin + (slot - nc))] = v;
}

}  // namespace maskmark
