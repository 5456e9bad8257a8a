// Minimal RIFF/WAVE codec: 16-bit integer PCM, 1-2 channels, little endian.
// fmt and data chunks are required; all other chunks are skipped on read.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "maskmark/audio_io.hpp"

namespace maskmark {

namespace {

constexpr std::uint16_t kFormatPcm = 1;

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void wr_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

void wr_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("read error on " + path);

  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw MalformedFile(path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* tag = reinterpret_cast<const char*>(buf.data() + pos);
    const std::uint32_t size = rd_u32(buf.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size())
      throw MalformedFile(path + ": chunk overruns file");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) throw MalformedFile(path + ": fmt chunk too short");
      format = rd_u16(buf.data() + body);
      channels = rd_u16(buf.data() + body + 2);
      rate = rd_u32(buf.data() + body + 4);
      bits = rd_u16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = buf.data() + body;
      data_len = size;
    }
    pos = body + size + (size & 1);  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr)
    throw MalformedFile(path + ": missing fmt or data chunk");
  if (format != kFormatPcm)
    throw UnsupportedFormat(path + ": compression code is not integer PCM");
  if (bits != 16) throw UnsupportedFormat(path + ": only 16-bit PCM supported");
  if (channels < 1 || channels > 2)
    throw UnsupportedFormat(path + ": only 1 or 2 channels supported");
  if (rate == 0) throw MalformedFile(path + ": zero sample rate");

  const std::size_t stride = 2u * channels;
  const std::size_t n = data_len / stride;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.assign(channels, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * stride + 2u * c;
      const std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      clip.samples[c][i] = s / 32768.0;
    }
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::string& path) {
  clip.validate();
  const int channels = clip.channels();
  const std::size_t n = clip.length();
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(clip.sample_rate) * channels * 2;
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * channels * 2);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  wr_tag(out, "RIFF");
  wr_u32(out, 36 + data_size);
  wr_tag(out, "WAVE");
  wr_tag(out, "fmt ");
  wr_u32(out, 16);
  wr_u16(out, kFormatPcm);
  wr_u16(out, static_cast<std::uint16_t>(channels));
  wr_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  wr_u32(out, byte_rate);
  wr_u16(out, static_cast<std::uint16_t>(channels * 2));
  wr_u16(out, 16);
  wr_tag(out, "data");
  wr_u32(out, data_size);

  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      const double scaled = std::round(clip.samples[c][i] * 32768.0);
      const double sat = std::clamp(scaled, -32768.0, 32767.0);
      const std::int16_t s = static_cast<std::int16_t>(sat);
      out.push_back(static_cast<unsigned char>(s & 0xff));
      out.push_back(static_cast<unsigned char>((s >> 8) & 0xff));
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoFailure("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw IoFailure("write error on " + path);
}

}  // namespace maskmark
