#include "maskmark/transforms.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "maskmark/kernels.hpp"

namespace maskmark {

WaveletPyramid dwt3(std::span<const double> frame) {
  const std::size_t l = frame.size();
  if (l == 0 || l % 8 != 0)
    throw BadLength("dwt3 requires a nonempty frame, length divisible by 8");

  const auto& k = kernels::active();
  WaveletPyramid p;
  p.d1.resize(l / 2);
  p.d2.resize(l / 4);
  p.d3.resize(l / 8);
  p.c3.resize(l / 8);

  std::vector<double> a1(l / 2), a2(l / 4);
  k.haar_analysis(frame.data(), l / 2, a1.data(), p.d1.data());
  k.haar_analysis(a1.data(), l / 4, a2.data(), p.d2.data());
  k.haar_analysis(a2.data(), l / 8, p.c3.data(), p.d3.data());
  return p;
}

std::vector<double> idwt3(const WaveletPyramid& p) {
  const std::size_t n3 = p.c3.size();
  if (n3 == 0 || p.d3.size() != n3 || p.d2.size() != 2 * n3 ||
      p.d1.size() != 4 * n3)
    throw BadLength("inconsistent pyramid lengths");

  const auto& k = kernels::active();
  std::vector<double> a2(2 * n3), a1(4 * n3), x(8 * n3);
  k.haar_synthesis(p.c3.data(), p.d3.data(), n3, a2.data());
  k.haar_synthesis(a2.data(), p.d2.data(), 2 * n3, a1.data());
  k.haar_synthesis(a1.data(), p.d1.data(), 4 * n3, x.data());
  return x;
}

DctPlan::DctPlan(int n) : n_(n) {
  if (n < 1) throw BadLength("DCT size must be >= 1");
  fwd_.resize(static_cast<std::size_t>(n) * n);
  inv_.resize(static_cast<std::size_t>(n) * n);
  const double s0 = std::sqrt(1.0 / n);
  const double s = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    const double scale = k == 0 ? s0 : s;
    for (int i = 0; i < n; ++i) {
      const double v =
          scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
      fwd_[static_cast<std::size_t>(k) * n + i] = v;
      inv_[static_cast<std::size_t>(i) * n + k] = v;
    }
  }
}

void DctPlan::forward(std::span<const double> in, std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(n_) || out.size() != in.size())
    throw BadLength("DCT size mismatch");
  kernels::active().matvec(fwd_.data(), n_, n_, in.data(), out.data());
}

void DctPlan::inverse(std::span<const double> in, std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(n_) || out.size() != in.size())
    throw BadLength("DCT size mismatch");
  kernels::active().matvec(inv_.data(), n_, n_, in.data(), out.data());
}

namespace {

const DctPlan& cached_plan(int n) {
  thread_local std::map<int, DctPlan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, DctPlan(n)).first;
  return it->second;
}

}  // namespace

std::vector<double> dct(std::span<const double> v) {
  std::vector<double> out(v.size());
  cached_plan(static_cast<int>(v.size())).forward(v, out);
  return out;
}

std::vector<double> idct(std::span<const double> v) {
  std::vector<double> out(v.size());
  cached_plan(static_cast<int>(v.size())).inverse(v, out);
  return out;
}

SubbandSpectrum subband_spectrum(const WaveletPyramid& p, const DctPlan& plan) {
  SubbandSpectrum s;
  s.x_c.resize(p.c3.size());
  s.x_d.resize(p.d3.size());
  plan.forward(p.c3, s.x_c);
  plan.forward(p.d3, s.x_d);
  return s;
}

}  // namespace maskmark
