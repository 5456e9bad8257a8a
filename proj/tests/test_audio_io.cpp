#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "maskmark/audio_io.hpp"

using namespace maskmark;

namespace {

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_raw(const std::string& path, const std::vector<unsigned char>& b) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(b.data()),
           static_cast<std::streamsize>(b.size()));
}

std::vector<unsigned char> wav_bytes(int fs, int channels,
                                     const std::vector<std::int16_t>& pcm,
                                     std::uint16_t format = 1) {
  std::vector<unsigned char> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back((v >> 8) & 0xff);
  };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  const std::uint32_t data = static_cast<std::uint32_t>(pcm.size() * 2);
  tag("RIFF");
  u32(36 + data);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(fs));
  u32(static_cast<std::uint32_t>(fs * channels * 2));
  u16(static_cast<std::uint16_t>(channels * 2));
  u16(16);
  tag("data");
  u32(data);
  for (std::int16_t s : pcm) u16(static_cast<std::uint16_t>(s));
  return b;
}

}  // namespace

TEST_CASE("read_wav scales 16-bit samples by 1/32768") {
  const auto path = tmp_path("mm_const.wav");
  write_raw(path, wav_bytes(8000, 1, std::vector<std::int16_t>(100, 16384)));
  const AudioClip c = read_wav(path);
  CHECK(c.sample_rate == 8000);
  CHECK(c.channels() == 1);
  CHECK(c.length() == 100);
  for (double v : c.samples[0]) CHECK(v == 0.5);
}

TEST_CASE("wav round trip reproduces the sample payload bit exactly") {
  testutil::Rng rng(5);
  std::vector<std::int16_t> pcm(1777);
  for (auto& s : pcm)
    s = static_cast<std::int16_t>(static_cast<std::uint16_t>(rng.next_u64()));
  const auto in = tmp_path("mm_rt_in.wav");
  const auto out = tmp_path("mm_rt_out.wav");
  write_raw(in, wav_bytes(44100, 1, pcm));
  write_wav(read_wav(in), out);

  std::ifstream a(in, std::ios::binary), b(out, std::ios::binary);
  std::vector<char> ba((std::istreambuf_iterator<char>(a)), {});
  std::vector<char> bb((std::istreambuf_iterator<char>(b)), {});
  REQUIRE(ba.size() == bb.size());
  CHECK(std::equal(ba.begin() + 44, ba.end(), bb.begin() + 44));
}

TEST_CASE("non-PCM compression code is rejected") {
  const auto path = tmp_path("mm_float.wav");
  write_raw(path, wav_bytes(8000, 1, std::vector<std::int16_t>(10, 0), 3));
  CHECK_THROWS_AS(read_wav(path), UnsupportedFormat);
}

TEST_CASE("truncated RIFF header is rejected") {
  const auto path = tmp_path("mm_trunc.wav");
  write_raw(path, {'R', 'I', 'F', 'F', 0, 0});
  CHECK_THROWS_AS(read_wav(path), MalformedFile);
}

TEST_CASE("missing file reports an I/O failure") {
  CHECK_THROWS_AS(read_wav(tmp_path("mm_does_not_exist.wav")), IoFailure);
}

TEST_CASE("write_wav saturates full scale to 32767") {
  AudioClip c = AudioClip::mono({1.0, -1.0, 0.0}, 8000);
  const auto path = tmp_path("mm_sat.wav");
  write_wav(c, path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(44);
  std::int16_t s[3];
  in.read(reinterpret_cast<char*>(s), 6);
  CHECK(s[0] == 32767);
  CHECK(s[1] == -32768);
  CHECK(s[2] == 0);
}

TEST_CASE("write_wav emits all-zero payload for silence") {
  AudioClip c = AudioClip::mono(std::vector<double>(64, 0.0), 8000);
  const auto path = tmp_path("mm_zero.wav");
  write_wav(c, path);
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(bytes.size() == 44 + 128);
  for (std::size_t i = 44; i < bytes.size(); ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("write/read round trip stays within one quantization step") {
  testutil::Rng rng(17);
  std::vector<double> x(5000);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  x[0] = 1.0;
  x[1] = -1.0;
  x[2] = 0.9999847;  // near the positive saturation edge
  const auto path = tmp_path("mm_quant.wav");
  write_wav(AudioClip::mono(x, 8000), path);
  const AudioClip back = read_wav(path);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::fabs(back.samples[0][i] - x[i]) <= 1.0 / 32767.0);
}

TEST_CASE("stereo clips keep channel separation through the codec") {
  std::vector<std::int16_t> pcm;
  for (int i = 0; i < 50; ++i) {
    pcm.push_back(static_cast<std::int16_t>(100 + i));  // left
    pcm.push_back(static_cast<std::int16_t>(-200 - i)); // right
  }
  const auto path = tmp_path("mm_stereo.wav");
  write_raw(path, wav_bytes(16000, 2, pcm));
  const AudioClip c = read_wav(path);
  REQUIRE(c.channels() == 2);
  CHECK(c.samples[0][0] == doctest::Approx(100.0 / 32768.0));
  CHECK(c.samples[1][0] == doctest::Approx(-200.0 / 32768.0));
}

TEST_CASE("frame_length_for reproduces the 63 ms rule") {
  CHECK(frame_length_for(8000) == 504);
  CHECK(frame_length_for(48000) == 3024);
  CHECK(frame_length_for(44100) == 2776);
  CHECK(frame_length_for(16000) == 1008);
  CHECK_THROWS_AS(frame_length_for(1999), RateTooLow);

  for (int fs = 2000; fs <= 96000; fs += 379) {
    const int l = frame_length_for(fs);
    CHECK(l % 8 == 0);
    CHECK(l >= 16);
    // 63 ms within one 8-sample granule
    CHECK(std::fabs(l - 0.063 * fs) <= 4.0 + 1e-9);
  }
}

TEST_CASE("frame_signal splits and pads as documented") {
  std::vector<double> x(1008, 0.25);
  FrameSet a = frame_signal(x, 504, 8000);
  CHECK(a.frame_count() == 2);
  CHECK(a.pad_len == 0);

  x.resize(1000);
  FrameSet b = frame_signal(x, 504, 8000);
  CHECK(b.frame_count() == 2);
  CHECK(b.pad_len == 8);
  for (int i = 0; i < 8; ++i) CHECK(b.frames[1][503 - i] == 0.0);

  CHECK_THROWS_AS(frame_signal(std::vector<double>{}, 504, 8000), EmptyInput);
}

TEST_CASE("deframe inverts frame_signal for every length") {
  testutil::Rng rng(23);
  for (std::size_t n : {1u, 7u, 503u, 504u, 505u, 1000u, 5040u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const FrameSet f = frame_signal(x, 504, 8000);
    const std::vector<double> back = deframe(f);
    REQUIRE(back.size() == x.size());
    CHECK(back == x);
  }

  FrameSet empty;
  empty.frame_len = 504;
  CHECK_THROWS_AS(deframe(empty), InvalidFrameSet);
}

TEST_CASE("resample at the same rate is the identity") {
  const AudioClip c = testutil::speech_clip(1, 8000);
  const AudioClip r = resample(c, 8000);
  CHECK(r.samples[0] == c.samples[0]);
}

TEST_CASE("440 Hz survives 44.1 kHz -> 8 kHz with its peak in place") {
  const auto x = testutil::sine(44100, 440.0, 0.5, 1.0);
  const AudioClip down = resample(AudioClip::mono(x, 44100), 8000);
  REQUIRE(down.sample_rate == 8000);
  // duration preserved within one sample period
  CHECK(std::llabs(static_cast<long long>(down.length()) - 8000) <= 1);

  const double at_tone = testutil::tone_amplitude(down.samples[0], 8000, 440.0);
  CHECK(at_tone == doctest::Approx(0.5).epsilon(0.01));
  // neighbouring bins are weaker: the peak is at 440 +- 2 Hz
  for (double off : {-10.0, -5.0, 5.0, 10.0}) {
    CHECK(testutil::tone_amplitude(down.samples[0], 8000, 440.0 + off) <
          at_tone);
  }
}

TEST_CASE("3.9 kHz passes the 8 kHz conversion with < 3 dB loss, aliases below -40 dB") {
  const auto x = testutil::sine(44100, 3900.0, 0.5, 1.0);
  const AudioClip down = resample(AudioClip::mono(x, 44100), 8000);
  const double kept = testutil::tone_amplitude(down.samples[0], 8000, 3900.0);
  CHECK(20.0 * std::log10(kept / 0.5) > -3.0);
  const double spur =
      testutil::max_offtone_amplitude(down.samples[0], 8000, 3900.0, 100.0);
  CHECK(20.0 * std::log10(spur / 0.5) < -40.0);
}

TEST_CASE("8 kHz round trip keeps band-limited tones above 20 dB SNR") {
  for (double f : {300.0, 1000.0, 3000.0}) {
    const auto x = testutil::sine(44100, f, 0.4, 0.8);
    const AudioClip c = AudioClip::mono(x, 44100);
    const AudioClip back = resample(resample(c, 8000), 44100);
    const std::size_t n = std::min(back.length(), c.length());
    double sig = 0, err = 0;
    // ignore filter warm-up at the edges
    const std::size_t guard = 2048;
    for (std::size_t i = guard; i < n - guard; ++i) {
      sig += x[i] * x[i];
      const double d = x[i] - back.samples[0][i];
      err += d * d;
    }
    CHECK(10.0 * std::log10(sig / err) >= 20.0);
  }
}

TEST_CASE("resample rejects rates below 2 kHz") {
  const AudioClip c = testutil::speech_clip(2, 8000, {.seconds = 0.3});
  CHECK_THROWS_AS(resample(c, 1000), RateTooLow);
}
