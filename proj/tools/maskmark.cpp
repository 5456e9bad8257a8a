// maskmark command line: protect | verify | analyze | attack | bench
//
// Exit codes: 0 success, 1 usage, 2 file I/O or format, 3 processing.
// Output files are written to a temp name and renamed at the end, so a
// failing run leaves no partial outputs.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maskmark/attacks.hpp"
#include "maskmark/bench.hpp"
#include "maskmark/embed.hpp"
#include "maskmark/metrics.hpp"
#include "maskmark/report.hpp"

namespace fs = std::filesystem;
using namespace maskmark;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitProcessing = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_key(const std::string& hex) {
  std::string s = hex;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16 ||
      s.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
    throw UsageError("key must be up to 16 hex digits");
  return std::strtoull(s.c_str(), nullptr, 16);
}

std::vector<int> parse_bands(const std::string& text) {
  std::vector<int> bands;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    const int b = std::stoi(item);
    if (b < 1 || b > 25) throw UsageError("band indices must be 1..25");
    bands.push_back(b);
  }
  if (bands.empty()) throw UsageError("band list is empty");
  return bands;
}

// Flat key=value config file. Flags given on the command line win; file
// values fill in the rest. Unknown keys are rejected.
class ConfigFile {
 public:
  void bind(const std::string& key, CLI::Option* opt,
            std::function<void(const std::string&)> set) {
    bindings_[key] = {opt, std::move(set)};
  }

  void apply(const std::string& path) const {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto begin = line.find_first_not_of(" \t\r");
      if (begin == std::string::npos) continue;
      const auto end = line.find_last_not_of(" \t\r");
      line = line.substr(begin, end - begin + 1);
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq == 0)
        throw UsageError(path + ":" + std::to_string(lineno) +
                         ": expected key=value");
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      auto strip = [](std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      strip(key);
      strip(value);
      const auto it = bindings_.find(key);
      if (it == bindings_.end())
        throw UsageError(path + ":" + std::to_string(lineno) +
                         ": unknown config key '" + key + "'");
      if (it->second.option != nullptr && it->second.option->count() > 0)
        continue;  // explicit flag wins
      it->second.set(value);
    }
  }

 private:
  struct Binding {
    CLI::Option* option;
    std::function<void(const std::string&)> set;
  };
  std::map<std::string, Binding> bindings_;
};

// Writes through a temporary file in the same directory, renamed on success.
class PendingFile {
 public:
  explicit PendingFile(std::string path)
      : path_(std::move(path)), tmp_(path_ + ".tmp") {}
  const std::string& tmp() const { return tmp_; }
  void commit() {
    fs::rename(tmp_, path_);
    committed_ = true;
  }
  ~PendingFile() {
    if (!committed_) {
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

 private:
  std::string path_, tmp_;
  bool committed_ = false;
};

PseudoTimbreSource make_source(const std::string& mode, std::uint64_t key,
                               const std::string& decoy_path) {
  if (mode == "keyed") return PseudoTimbreSource::keyed(key);
  if (mode == "decoy") {
    if (decoy_path.empty()) throw UsageError("decoy mode needs --decoy");
    return PseudoTimbreSource::from_decoy(read_wav(decoy_path));
  }
  throw UsageError("mode must be keyed or decoy");
}

int run_protect(const std::string& in, const std::string& out,
                const std::string& sidecar_path, const PseudoTimbreSource& src,
                const EmbedConfig& cfg) {
  const AudioClip clip = read_wav(in);
  const ProtectResult res = protect(clip, src, cfg);

  PendingFile wav_out(out);
  PendingFile sc_out(sidecar_path);
  write_wav(res.audio, wav_out.tmp());
  res.sidecar.save(sc_out.tmp());
  wav_out.commit();
  sc_out.commit();

  const ProtectStats& st = res.stats;
  std::printf("frames %lld\n", static_cast<long long>(st.full_frames));
  std::printf("embedded_bands %lld\n", static_cast<long long>(st.embedded_bands));
  std::printf("skipped_bands %lld\n", static_cast<long long>(st.skipped_bands));
  std::printf("bits %lld\n", static_cast<long long>(st.total_bits));
  std::printf("clipped_samples %lld\n",
              static_cast<long long>(st.clipped_samples));
  std::printf("mean_nmr_db %.6f\n", st.mean_nmr_db);
  std::printf("max_nmr_db %.6f\n", st.max_nmr_db);
  if (st.all_skipped)
    std::printf("warning: every band of every frame was skipped\n");
  return kExitOk;
}

int run_verify(const std::string& in, const std::string& sidecar_path,
               bool key_override, std::uint64_t key,
               const std::string& decoy_path) {
  const AudioClip clip = read_wav(in);
  const ProtectionSidecar sc = ProtectionSidecar::load(sidecar_path);

  PseudoTimbreSource src;
  if (sc.mode == TimbreMode::keyed) {
    src = PseudoTimbreSource::keyed(key_override ? key : sc.key);
  } else {
    if (decoy_path.empty())
      throw UsageError("sidecar uses decoy mode; pass --decoy");
    src = PseudoTimbreSource::from_decoy(read_wav(decoy_path));
  }

  const VerifyReport rep = verify(clip, sc, src);
  for (const auto& b : rep.bands)
    std::printf("band %d bits %lld errors %lld ber %.6f\n", b.band_index,
                static_cast<long long>(b.bits),
                static_cast<long long>(b.errors), b.ber);
  std::printf("overall bits %lld errors %lld ber %.6f\n",
              static_cast<long long>(rep.bits),
              static_cast<long long>(rep.errors), rep.ber);
  if (rep.ber > 0.4)
    std::printf("warning: bit error rate near 0.5; wrong key or unmarked audio\n");
  return kExitOk;
}

int run_analyze(const std::string& in, const std::string& report_path,
                const EmbedConfig& cfg) {
  const AudioClip clip = read_wav(in);
  if (report_path == "-") {
    write_analysis_report(std::cout, clip, cfg);
    return kExitOk;
  }
  PendingFile out(report_path);
  {
    std::ofstream os(out.tmp(), std::ios::trunc);
    if (!os) throw IoFailure("cannot open " + report_path + " for writing");
    write_analysis_report(os, clip, cfg);
    if (!os.flush()) throw IoFailure("write error on " + report_path);
  }
  out.commit();
  return kExitOk;
}

int run_attack(const std::string& in, const std::string& out,
               const std::string& spec_text) {
  AttackSpec spec;
  try {
    spec = AttackSpec::parse(spec_text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad attack spec: ") + e.what());
  }
  const AudioClip clip = read_wav(in);
  const AudioClip result = apply_attack(clip, spec);

  // attacks may push samples out of range; the writer saturates
  AudioClip bounded = result;
  for (auto& ch : bounded.samples)
    for (auto& v : ch) v = std::clamp(v, -1.0, 1.0);

  PendingFile wav_out(out);
  write_wav(bounded, wav_out.tmp());
  wav_out.commit();
  std::printf("attack %s\n", spec.describe().c_str());
  std::printf("sample_rate %d\n", bounded.sample_rate);
  return kExitOk;
}

int run_bench(const std::string& dir, const PseudoTimbreSource& src,
              const EmbedConfig& cfg) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw IoFailure(dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw IoFailure("no .wav files in " + dir);

  const BenchResult r = bench_protect(paths, src, cfg);
  std::printf("files %d\n", r.files);
  std::printf("audio_seconds %.3f\n", r.audio_seconds);
  std::printf("wall_seconds %.6f\n", r.wall_seconds);
  std::printf("rtf %.2f\n", r.realtime_factor);
  std::printf("ns_per_sample %.1f\n", r.ns_per_sample);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masking-threshold QIM audio marking"};
  app.require_subcommand(1);

  // shared option state
  std::string in_path, out_path, sidecar_path, report_path, decoy_path;
  std::string key_hex = "0", mode = "keyed", bands_text = "1,2,3,4,5,6,7";
  std::string attack_text, config_path;
  double nmr_limit = -5.0, skip_floor = 0.0;

  auto* protect_cmd = app.add_subcommand("protect", "embed a decoy bitstream");
  protect_cmd->add_option("input", in_path, "input WAV")->required();
  protect_cmd->add_option("output", out_path, "output WAV")->required();
  auto* po_sc = protect_cmd->add_option("--sidecar", sidecar_path,
                                        "sidecar path (default output + .sidecar)");
  auto* po_key = protect_cmd->add_option("--key", key_hex, "64-bit hex key");
  auto* po_mode = protect_cmd->add_option("--mode", mode, "keyed | decoy");
  auto* po_decoy = protect_cmd->add_option("--decoy", decoy_path, "decoy WAV");
  auto* po_bands =
      protect_cmd->add_option("--bands", bands_text, "embed bands, e.g. 1,2,3");
  auto* po_nmr =
      protect_cmd->add_option("--nmr-limit", nmr_limit, "NMR bound in dB (< 0)");
  auto* po_floor = protect_cmd->add_option("--skip-floor", skip_floor,
                                           "minimum threshold energy to embed");
  protect_cmd->add_option("--config", config_path, "flat key=value config");

  auto* verify_cmd = app.add_subcommand("verify", "decode and compare bits");
  verify_cmd->add_option("input", in_path, "input WAV")->required();
  auto* vo_sc =
      verify_cmd->add_option("--sidecar", sidecar_path, "sidecar path")->required();
  auto* vo_key =
      verify_cmd->add_option("--key", key_hex, "override the sidecar key");
  auto* vo_decoy = verify_cmd->add_option("--decoy", decoy_path, "decoy WAV");
  verify_cmd->add_option("--config", config_path, "flat key=value config");

  auto* analyze_cmd =
      app.add_subcommand("analyze", "export per-band masking rows");
  analyze_cmd->add_option("input", in_path, "input WAV")->required();
  auto* ao_rep = analyze_cmd->add_option("--report", report_path,
                                         "report path or - for stdout");
  auto* ao_bands = analyze_cmd->add_option("--bands", bands_text, "embed bands");
  auto* ao_nmr = analyze_cmd->add_option("--nmr-limit", nmr_limit, "NMR bound");
  analyze_cmd->add_option("--config", config_path, "flat key=value config");

  auto* attack_cmd = app.add_subcommand("attack", "attacker preprocessing");
  attack_cmd->add_option("input", in_path, "input WAV")->required();
  attack_cmd->add_option("output", out_path, "output WAV")->required();
  auto* ko_spec = attack_cmd
                      ->add_option("--attack", attack_text,
                                   "kind:key=value,... (resample, denoise, "
                                   "noise, requantize)")
                      ->required();
  attack_cmd->add_option("--config", config_path, "flat key=value config");

  auto* bench_cmd = app.add_subcommand("bench", "protect throughput over a dir");
  bench_cmd->add_option("corpus", in_path, "directory of WAVs")->required();
  auto* bo_key = bench_cmd->add_option("--key", key_hex, "64-bit hex key");
  auto* bo_bands = bench_cmd->add_option("--bands", bands_text, "embed bands");
  auto* bo_nmr = bench_cmd->add_option("--nmr-limit", nmr_limit, "NMR bound");
  bench_cmd->add_option("--config", config_path, "flat key=value config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    bool key_from_config = false;
    if (!config_path.empty()) {
      // bind the live Option pointers so explicit flags keep precedence
      ConfigFile config;
      config.bind("key", protect_cmd->parsed() ? po_key
                         : verify_cmd->parsed() ? vo_key
                         : bench_cmd->parsed()  ? bo_key
                                                : nullptr,
                  [&](const std::string& v) {
                    key_hex = v;
                    key_from_config = true;
                  });
      config.bind("mode", po_mode, [&](const std::string& v) { mode = v; });
      config.bind("decoy", protect_cmd->parsed() ? po_decoy : vo_decoy,
                  [&](const std::string& v) { decoy_path = v; });
      config.bind("bands", protect_cmd->parsed() ? po_bands
                           : analyze_cmd->parsed() ? ao_bands
                           : bench_cmd->parsed()   ? bo_bands
                                                   : nullptr,
                  [&](const std::string& v) { bands_text = v; });
      config.bind("nmr_limit", protect_cmd->parsed() ? po_nmr
                               : analyze_cmd->parsed() ? ao_nmr
                               : bench_cmd->parsed()   ? bo_nmr
                                                       : nullptr,
                  [&](const std::string& v) { nmr_limit = std::stod(v); });
      config.bind("skip_floor", po_floor,
                  [&](const std::string& v) { skip_floor = std::stod(v); });
      config.bind("sidecar", protect_cmd->parsed() ? po_sc : vo_sc,
                  [&](const std::string& v) { sidecar_path = v; });
      config.bind("attack", ko_spec,
                  [&](const std::string& v) { attack_text = v; });
      config.bind("report", ao_rep,
                  [&](const std::string& v) { report_path = v; });
      config.apply(config_path);
    }

    EmbedConfig cfg;
    cfg.nmr_limit_db = nmr_limit;
    cfg.embed_bands = parse_bands(bands_text);
    cfg.skip_floor = skip_floor;
    if (!(cfg.nmr_limit_db < 0.0)) throw UsageError("--nmr-limit must be < 0");

    if (protect_cmd->parsed()) {
      if (sidecar_path.empty()) sidecar_path = out_path + ".sidecar";
      const auto src = make_source(mode, parse_key(key_hex), decoy_path);
      return run_protect(in_path, out_path, sidecar_path, src, cfg);
    }
    if (verify_cmd->parsed()) {
      const bool key_override = vo_key->count() > 0 || key_from_config;
      return run_verify(in_path, sidecar_path, key_override,
                        parse_key(key_hex), decoy_path);
    }
    if (analyze_cmd->parsed()) {
      if (report_path.empty()) report_path = in_path + ".analysis.txt";
      return run_analyze(in_path, report_path, cfg);
    }
    if (attack_cmd->parsed()) {
      return run_attack(in_path, out_path, attack_text);
    }
    if (bench_cmd->parsed()) {
      const auto src = make_source(mode, parse_key(key_hex), decoy_path);
      return run_bench(in_path, src, cfg);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const MalformedFile& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const UnsupportedFormat& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitProcessing;
  }
}
