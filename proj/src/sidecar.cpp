// Sidecar file format, line-oriented text (version 1):
//
//   maskmark-sidecar 1
//   fs <hz>
//   channels <n>
//   length <samples per channel>
//   frame_len <L>
//   bands <b1> <b2> ...
//   mode keyed|decoy
//   key <16 hex digits>          (keyed mode only)
//   nmr_limit <dB>
//   frames <embedded frame count>
//   entry <ch> <frame> <band> <delta|skip>
//   ...
//
// delta is printed with 17 significant digits so a load/save round trip is
// bit exact.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "maskmark/embed.hpp"

namespace maskmark {

namespace {

constexpr const char* kMagic = "maskmark-sidecar";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ProtectionSidecar::save(const std::string& path) const {
  std::ostringstream os;
  os << kMagic << ' ' << version << '\n';
  os << "fs " << fs << '\n';
  os << "channels " << channels << '\n';
  os << "length " << length << '\n';
  os << "frame_len " << frame_len << '\n';
  os << "bands";
  for (int b : embed_bands) os << ' ' << b;
  os << '\n';
  os << "mode " << (mode == TimbreMode::keyed ? "keyed" : "decoy") << '\n';
  if (mode == TimbreMode::keyed) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, key);
    os << "key " << buf << '\n';
  }
  os << "nmr_limit " << format_double(nmr_limit_db) << '\n';
  os << "frames " << embedded_frames() << '\n';
  for (std::size_t ch = 0; ch < entries.size(); ++ch) {
    for (std::size_t f = 0; f < entries[ch].size(); ++f) {
      for (std::size_t pos = 0; pos < entries[ch][f].size(); ++pos) {
        const SidecarEntry& e = entries[ch][f][pos];
        os << "entry " << ch << ' ' << f << ' ' << embed_bands[pos] << ' ';
        if (e.skipped)
          os << "skip";
        else
          os << format_double(e.delta);
        os << '\n';
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  const std::string text = os.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoFailure("write error on " + path);
}

ProtectionSidecar ProtectionSidecar::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);

  ProtectionSidecar sc;
  std::string line;
  if (!std::getline(in, line))
    throw MalformedFile(path + ": empty sidecar");
  {
    std::istringstream ls(line);
    std::string magic;
    ls >> magic >> sc.version;
    if (magic != kMagic || sc.version != 1)
      throw MalformedFile(path + ": not a version-1 sidecar");
  }

  std::size_t frames = 0;
  bool have_key = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "fs") {
      ls >> sc.fs;
    } else if (tag == "channels") {
      ls >> sc.channels;
    } else if (tag == "length") {
      ls >> sc.length;
    } else if (tag == "frame_len") {
      ls >> sc.frame_len;
    } else if (tag == "bands") {
      int b;
      while (ls >> b) sc.embed_bands.push_back(b);
    } else if (tag == "mode") {
      std::string m;
      ls >> m;
      if (m == "keyed")
        sc.mode = TimbreMode::keyed;
      else if (m == "decoy")
        sc.mode = TimbreMode::decoy;
      else
        throw MalformedFile(path + ": unknown mode " + m);
    } else if (tag == "key") {
      std::string hex;
      ls >> hex;
      sc.key = std::strtoull(hex.c_str(), nullptr, 16);
      have_key = true;
    } else if (tag == "nmr_limit") {
      ls >> sc.nmr_limit_db;
    } else if (tag == "frames") {
      ls >> frames;
      if (sc.channels < 1 || sc.embed_bands.empty())
        throw MalformedFile(path + ": frames before header fields");
      sc.entries.assign(
          static_cast<std::size_t>(sc.channels),
          std::vector<std::vector<SidecarEntry>>(
              frames, std::vector<SidecarEntry>(sc.embed_bands.size())));
    } else if (tag == "entry") {
      std::size_t ch, f;
      int band;
      std::string value;
      if (!(ls >> ch >> f >> band >> value))
        throw MalformedFile(path + ": bad entry line");
      if (ch >= sc.entries.size() || f >= frames)
        throw MalformedFile(path + ": entry out of range");
      std::size_t pos = sc.embed_bands.size();
      for (std::size_t i = 0; i < sc.embed_bands.size(); ++i)
        if (sc.embed_bands[i] == band) pos = i;
      if (pos == sc.embed_bands.size())
        throw MalformedFile(path + ": entry for unlisted band");
      SidecarEntry& e = sc.entries[ch][f][pos];
      if (value == "skip") {
        e.skipped = true;
        e.delta = 0;
      } else {
        e.skipped = false;
        e.delta = std::strtod(value.c_str(), nullptr);
        if (!(e.delta > 0))
          throw MalformedFile(path + ": nonpositive delta");
      }
    } else {
      throw MalformedFile(path + ": unknown line tag " + tag);
    }
  }

  if (sc.fs <= 0 || sc.channels < 1 || sc.frame_len <= 0)
    throw MalformedFile(path + ": incomplete header");
  if (sc.mode == TimbreMode::keyed && !have_key)
    throw MalformedFile(path + ": keyed sidecar without key");
  return sc;
}

}  // namespace maskmark
