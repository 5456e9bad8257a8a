// End-to-end checks of the command line binary. The binary path comes from
// the MASKMARK_BIN environment variable (set by the test harness).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "helpers.hpp"
#include "maskmark/audio_io.hpp"

namespace fs = std::filesystem;
using namespace maskmark;

namespace {

std::string bin_path() {
  const char* p = std::getenv("MASKMARK_BIN");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string out_file =
      (fs::temp_directory_path() / "mm_cli_out.txt").string();
  const std::string cmd = bin_path() + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

double grab_value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + " ", 0) == 0)
      return std::stod(line.substr(key.size() + 1));
  }
  FAIL("key not found in output: " << key << "\n" << text);
  return 0;
}

std::string last_ber_line(const std::string& text) {
  std::istringstream is(text);
  std::string line, found;
  while (std::getline(is, line))
    if (line.rfind("overall ", 0) == 0) found = line;
  return found;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mm_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("protect writes outputs, keeps duration, reports NMR under the bound") {
  TempDir dir;
  const std::string in = dir.file("in.wav");
  // continuous voiced clip (no silent gaps) so the 16-bit file round trip
  // keeps every band's lattice step well above the quantization noise
  write_wav(testutil::speech_clip(901, 8000, {.pause_fraction = 0.0}), in);

  const std::string out = dir.file("out.wav");
  const auto r = run("protect " + in + " " + out + " --key 00ffcc");
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out));
  REQUIRE(fs::exists(out + ".sidecar"));
  CHECK(read_wav(out).length() == read_wav(in).length());
  CHECK(grab_value(r.out, "mean_nmr_db") <= -5.0);
  CHECK(grab_value(r.out, "max_nmr_db") <= -5.0 + 1e-9);

  SUBCASE("clean verify decodes zero errors through the 16-bit file") {
    const auto v = run("verify " + out + " --sidecar " + out + ".sidecar");
    CHECK(v.exit_code == 0);
    CHECK(last_ber_line(v.out).find("ber 0.000000") != std::string::npos);
  }

  SUBCASE("wrong key decodes a fair coin and warns, still exit 0") {
    const auto v = run("verify " + out + " --sidecar " + out +
                       ".sidecar --key 123456");
    CHECK(v.exit_code == 0);
    double ber = 0;
    {
      std::istringstream is(last_ber_line(v.out));
      std::string w;
      while (is >> w)
        if (w == "ber") is >> ber;
    }
    CHECK(ber > 0.4);
    CHECK(ber < 0.6);
    CHECK(v.out.find("warning") != std::string::npos);
  }

  SUBCASE("rate mismatch exits nonzero") {
    const std::string in16 = dir.file("in16.wav");
    write_wav(testutil::speech_clip(902, 16000, {.seconds = 1.0}), in16);
    const auto v = run("verify " + in16 + " --sidecar " + out + ".sidecar");
    CHECK(v.exit_code != 0);
  }
}

TEST_CASE("protect on a missing input fails without partial outputs") {
  TempDir dir;
  const std::string out = dir.file("nope_out.wav");
  const auto r = run("protect " + dir.file("missing.wav") + " " + out);
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(out + ".sidecar"));
}

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  const auto r = run("protect");
  CHECK(r.exit_code == 1);
  const std::string in = dir.file("in.wav");
  write_wav(testutil::speech_clip(903, 8000, {.seconds = 0.5}), in);
  const auto r2 =
      run("attack " + in + " " + dir.file("o.wav") + " --attack junk:x=1");
  CHECK(r2.exit_code == 1);
  const auto r3 = run("protect " + in + " " + dir.file("o.wav") +
                      " --nmr-limit 2");
  CHECK(r3.exit_code == 1);
}

TEST_CASE("analyze emits one row per channel, frame and band") {
  TempDir dir;
  const std::string in = dir.file("tone.wav");
  // 2 s at 8 kHz: 32 frames (31 full + padded final), 9 analysis bands
  const double f = 32.0 * 8000.0 / 1008.0;
  write_wav(AudioClip::mono(testutil::sine(8000, f, 0.9, 2.0), 8000), in);
  const std::string report = dir.file("report.txt");
  const auto r = run("analyze " + in + " --report " + report);
  CHECK(r.exit_code == 0);

  std::ifstream is(report);
  std::string line;
  int rows = 0, header = 0;
  int band3_tonal_rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      ++header;
      continue;
    }
    ++rows;
    std::istringstream ls(line);
    int ch, frame, band, count;
    double energy, sfm, alpha;
    ls >> ch >> frame >> band >> count >> energy >> sfm >> alpha;
    if (band == 3 && alpha > 0.85) ++band3_tonal_rows;
  }
  CHECK(header == 3);
  CHECK(rows == 32 * 9);
  // the tone sits bin-centered in band 3: strongly tonal in the full frames
  CHECK(band3_tonal_rows >= 30);
}

TEST_CASE("analyze on silence reports the hearing-floor thresholds") {
  TempDir dir;
  const std::string in = dir.file("silence.wav");
  write_wav(AudioClip::mono(std::vector<double>(8000, 0.0), 8000), in);
  const auto r = run("analyze " + in + " --report -");
  CHECK(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int ch, frame, band, count;
    double energy, sfm, alpha, offset, spread, rawt, athdb, athe, tz;
    ls >> ch >> frame >> band >> count >> energy >> sfm >> alpha >> offset >>
        spread >> rawt >> athdb >> athe >> tz;
    CHECK(energy == 0.0);
    CHECK(tz == doctest::Approx(count * athe).epsilon(1e-6));
  }
}

TEST_CASE("attack subcommand round trips through files") {
  TempDir dir;
  const std::string in = dir.file("in.wav");
  write_wav(testutil::speech_clip(905, 44100, {.seconds = 0.7}), in);
  const std::string out = dir.file("attacked.wav");

  const auto r = run("attack " + in + " " + out + " --attack resample:rate=8000");
  CHECK(r.exit_code == 0);
  const AudioClip a = read_wav(out);
  CHECK(a.sample_rate == 44100);

  // seeded noise is reproducible byte for byte
  const std::string n1 = dir.file("n1.wav"), n2 = dir.file("n2.wav");
  CHECK(run("attack " + in + " " + n1 + " --attack noise:snr=20,seed=5").exit_code == 0);
  CHECK(run("attack " + in + " " + n2 + " --attack noise:snr=20,seed=5").exit_code == 0);
  std::ifstream f1(n1, std::ios::binary), f2(n2, std::ios::binary);
  std::vector<char> b1((std::istreambuf_iterator<char>(f1)), {});
  std::vector<char> b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
}

TEST_CASE("config file fills defaults and flags override it") {
  TempDir dir;
  const std::string in = dir.file("in.wav");
  write_wav(testutil::speech_clip(907, 8000, {.seconds = 1.0}), in);
  const std::string cfg = dir.file("mm.conf");
  {
    std::ofstream os(cfg);
    os << "# comment line\n";
    os << "key=aa55aa55\n";
    os << "nmr_limit=-8\n";
  }
  const std::string out = dir.file("out.wav");
  const auto r = run("protect " + in + " " + out + " --config " + cfg);
  CHECK(r.exit_code == 0);
  // config key decodes cleanly; a different key does not
  const auto v1 = run("verify " + out + " --sidecar " + out + ".sidecar");
  CHECK(last_ber_line(v1.out).find("ber 0.000000") != std::string::npos);

  // flag overrides config: protecting with --nmr-limit -6 must report <= -6
  const std::string out2 = dir.file("out2.wav");
  const auto r2 =
      run("protect " + in + " " + out2 + " --config " + cfg + " --nmr-limit -6");
  CHECK(r2.exit_code == 0);
  CHECK(grab_value(r2.out, "max_nmr_db") <= -6.0 + 1e-9);

  // unknown config keys are rejected as usage errors
  {
    std::ofstream os(cfg, std::ios::app);
    os << "volume=11\n";
  }
  const auto r3 = run("protect " + in + " " + dir.file("out3.wav") +
                      " --config " + cfg);
  CHECK(r3.exit_code == 1);
  CHECK_FALSE(fs::exists(dir.file("out3.wav")));
}

TEST_CASE("bench requires wav files and reports throughput") {
  TempDir dir;
  const auto empty = run("bench " + dir.path.string());
  CHECK(empty.exit_code != 0);

  for (int i = 0; i < 10; ++i) {
    write_wav(testutil::speech_clip(1000 + static_cast<unsigned>(i), 8000,
                                    {.seconds = 1.0}),
              dir.file(("c" + std::to_string(i) + ".wav").c_str()));
  }
  const auto r = run("bench " + dir.path.string());
  CHECK(r.exit_code == 0);
  CHECK(grab_value(r.out, "files") == 10);
  CHECK(grab_value(r.out, "rtf") > 0.0);

  // repeated runs land close together (typical spread is a few percent)
  const auto r2 = run("bench " + dir.path.string());
  const double a = grab_value(r.out, "rtf");
  const double b = grab_value(r2.out, "rtf");
  CHECK(std::fabs(a - b) / std::min(a, b) < 0.20);
}

TEST_CASE("two protect runs produce bit-identical outputs") {
  TempDir dir;
  const std::string in = dir.file("in.wav");
  write_wav(testutil::speech_clip(909, 8000, {.seconds = 1.2}), in);
  const std::string o1 = dir.file("p1.wav"), o2 = dir.file("p2.wav");
  CHECK(run("protect " + in + " " + o1 + " --key 77").exit_code == 0);
  CHECK(run("protect " + in + " " + o2 + " --key 77").exit_code == 0);

  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(f)), {});
  };
  CHECK(slurp(o1) == slurp(o2));
  CHECK(slurp(o1 + ".sidecar") == slurp(o2 + ".sidecar"));
}
