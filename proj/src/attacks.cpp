#include "maskmark/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "maskmark/embed.hpp"
#include "maskmark/stft.hpp"

namespace maskmark {

AudioClip attack_resample(const AudioClip& clip, int target_rate) {
  if (target_rate == clip.sample_rate) return clip;
  return resample(resample(clip, target_rate), clip.sample_rate);
}

AudioClip attack_denoise(const AudioClip& clip, double beta, double gain_floor) {
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const int window = Stft::window_for(clip.sample_rate);

  for (const auto& ch : clip.samples) {
    Stft stft(ch, window);
    const std::size_t bins = static_cast<std::size_t>(stft.window());
    const std::size_t frames = stft.frames();

    // per-bin noise floor: 10th percentile of magnitudes across frames
    std::vector<double> floor(bins, 0.0);
    std::vector<double> mags(frames);
    for (std::size_t b = 0; b < bins; ++b) {
      for (std::size_t f = 0; f < frames; ++f)
        mags[f] = std::abs(stft.spectrum(f)[b]);
      const std::size_t k =
          static_cast<std::size_t>(std::llround(0.10 * (frames - 1)));
      std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k),
                       mags.end());
      floor[b] = mags[k];
    }

    for (std::size_t f = 0; f < frames; ++f) {
      auto& spec = stft.spectrum(f);
      for (std::size_t b = 0; b < bins; ++b) {
        const double mag = std::abs(spec[b]);
        const double gain =
            mag > 0.0 ? std::max(1.0 - beta * floor[b] / mag, gain_floor)
                      : gain_floor;
        spec[b] *= gain;
      }
    }
    out.samples.push_back(stft.synthesize());
  }
  return out;
}

namespace {

// deterministic normal deviates: splitmix64 stream + Box-Muller
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

AudioClip attack_noise(const AudioClip& clip, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return clip;

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  GaussianStream rng(seed);
  for (const auto& ch : clip.samples) {
    const std::size_t n = ch.size();
    std::vector<double> noise(n);
    double p_sig = 0.0, p_noise = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      noise[i] = rng.next();
      p_sig += ch[i] * ch[i];
      p_noise += noise[i] * noise[i];
    }
    // exact rescale: realized SNR equals the request up to float rounding
    double scale = 0.0;
    if (p_noise > 0.0 && p_sig > 0.0)
      scale = std::sqrt(p_sig / p_noise * std::pow(10.0, -snr_db / 10.0));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = ch[i] + scale * noise[i];
    out.samples.push_back(std::move(y));
  }
  return out;
}

AudioClip attack_requantize(const AudioClip& clip, int bits) {
  if (bits < 4 || bits > 16) throw Error("requantize depth must be 4..16");
  const double q = std::pow(2.0, 1 - bits);  // step of the mid-rise grid
  const double top = 1.0 - q / 2.0;

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  for (const auto& ch : clip.samples) {
    std::vector<double> y(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const double level = (std::floor(ch[i] / q) + 0.5) * q;
      y[i] = std::clamp(level, -top, top);
    }
    out.samples.push_back(std::move(y));
  }
  return out;
}

AudioClip apply_attack(const AudioClip& clip, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackSpec::Kind::resample:
      return attack_resample(clip, spec.target_rate);
    case AttackSpec::Kind::denoise:
      return attack_denoise(clip, spec.beta, spec.gain_floor);
    case AttackSpec::Kind::additive_noise:
      return attack_noise(clip, spec.snr_db, spec.seed);
    case AttackSpec::Kind::requantize:
      return attack_requantize(clip, spec.bits);
  }
  throw Error("unknown attack kind");
}

AttackSpec AttackSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::istringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("attack parameter needs key=value: " + item);
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }

  auto take = [&kv](const char* name) -> std::string {
    auto it = kv.find(name);
    if (it == kv.end()) return {};
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  AttackSpec spec;
  if (kind == "resample") {
    spec.kind = Kind::resample;
    if (auto v = take("rate"); !v.empty()) spec.target_rate = std::stoi(v);
    if (spec.target_rate < 2000)
      throw std::invalid_argument("resample rate must be >= 2000");
  } else if (kind == "denoise") {
    spec.kind = Kind::denoise;
    if (auto v = take("beta"); !v.empty()) spec.beta = std::stod(v);
    if (auto v = take("floor"); !v.empty()) spec.gain_floor = std::stod(v);
    if (spec.beta < 0 || spec.gain_floor < 0 || spec.gain_floor > 1)
      throw std::invalid_argument("denoise parameters out of range");
  } else if (kind == "noise") {
    spec.kind = Kind::additive_noise;
    if (auto v = take("snr"); !v.empty())
      spec.snr_db = v == "inf" ? std::numeric_limits<double>::infinity()
                               : std::stod(v);
    if (auto v = take("seed"); !v.empty()) spec.seed = std::stoull(v);
  } else if (kind == "requantize") {
    spec.kind = Kind::requantize;
    if (auto v = take("bits"); !v.empty()) spec.bits = std::stoi(v);
    if (spec.bits < 4 || spec.bits > 16)
      throw std::invalid_argument("requantize bits must be 4..16");
  } else {
    throw std::invalid_argument("unknown attack kind: " + kind);
  }
  if (!kv.empty())
    throw std::invalid_argument("unknown attack parameter: " + kv.begin()->first);
  return spec;
}

std::string AttackSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::resample:
      os << "resample:rate=" << target_rate;
      break;
    case Kind::denoise:
      os << "denoise:beta=" << beta << ",floor=" << gain_floor;
      break;
    case Kind::additive_noise:
      os << "noise:snr=" << snr_db << ",seed=" << seed;
      break;
    case Kind::requantize:
      os << "requantize:bits=" << bits;
      break;
  }
  return os.str();
}

}  // namespace maskmark
