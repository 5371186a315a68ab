// core/src/adapters.cc

// Copyright 2026  The switchasr Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "switchasr/adapters.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "switchasr/error.h"
#include "switchasr/subprocess.h"
#include "switchasr/wav_io.h"

namespace switchasr {

namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteAtomically(const std::string &path, const std::string &bytes) {
  static std::atomic<unsigned> counter{0};
  const std::string tmp =
      path + ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("cannot write '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

std::string Expand(const std::string &templ,
                   const std::vector<std::pair<std::string, std::string>> &values) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    bool replaced = false;
    if (templ[i] == '{') {
      for (const auto &[key, val] : values) {
        const std::string ph = "{" + key + "}";
        if (templ.compare(i, ph.size(), ph) == 0) {
          out += ShellQuote(val);
          i += ph.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(templ[i++]);
  }
  return out;
}

class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "switchasr-adapter-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error("mkdtemp failed");
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;
  std::string File(const std::string &name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void CheckRun(const ProcessResult &r, const std::string &utt) {
  if (r.timed_out) throw AdapterError(utt, "timed out");
  if (r.exit_code != 0) {
    std::string tail = r.stderr_text.size() > 400
                           ? r.stderr_text.substr(r.stderr_text.size() - 400)
                           : r.stderr_text;
    throw AdapterError(utt, "exit status " + std::to_string(r.exit_code) + ": " + tail);
  }
}

std::string WavBytes(const Waveform &w) {
  std::ostringstream os(std::ios::binary);
  WriteWav(w, os);
  return os.str();
}

Waveform LoadComponent(const Manifest &m, const std::string &stored) {
  return ReadWav(m.Resolve(stored));
}

}  // namespace

std::string Sha256Hex(const std::string &data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

CommandSeAdapter::CommandSeAdapter(CommandOptions opts) : opts_(std::move(opts)) {
  if (opts_.command.find("{output}") == std::string::npos)
    throw ConfigError("SE command template lacks {output}");
  if (!opts_.cache_dir.empty()) fs::create_directories(opts_.cache_dir);
}

Waveform CommandSeAdapter::Extract(const Manifest &manifest, const ManifestRecord &rec,
                                   ExtractRole role) {
  const std::string input = manifest.Resolve(rec.mixture);
  std::string enroll;
  if (role == ExtractRole::kTarget) {
    enroll = manifest.Resolve(rec.enrollment_target);
  } else {
    if (!rec.enrollment_interferer)
      throw AdapterError(rec.utt_id, "no interferer enrollment");
    enroll = manifest.Resolve(*rec.enrollment_interferer);
  }

  std::string cache_file;
  if (!opts_.cache_dir.empty()) {
    // Key: the command with utterance-level placeholders filled, plus the bytes of
    // both input files.
    const std::string cmd_key = Expand(
        opts_.command, {{"utt", rec.utt_id}, {"manifest", opts_.manifest_path}});
    const std::string key = Sha256Hex("se\n" + cmd_key + '\0' + Sha256Hex(Slurp(input)) +
                                      Sha256Hex(Slurp(enroll)));
    cache_file = (fs::path(opts_.cache_dir) / (key + ".wav")).string();
    if (fs::exists(cache_file)) return ReadWav(cache_file);
  }

  ScratchDir scratch;
  const std::string output = scratch.File("out.wav");
  const std::string cmd = Expand(opts_.command, {{"input", input},
                                                  {"enroll", enroll},
                                                  {"output", output},
                                                  {"utt", rec.utt_id},
                                                  {"manifest", opts_.manifest_path}});
  CheckRun(RunShell(cmd, opts_.timeout), rec.utt_id);
  if (!fs::exists(output)) throw AdapterError(rec.utt_id, "SE wrote no output");
  Waveform w;
  try {
    w = ReadWav(output);
  } catch (const FormatError &e) {
    throw AdapterError(rec.utt_id, std::string("bad SE output: ") + e.what());
  }
  if (!cache_file.empty()) WriteAtomically(cache_file, Slurp(output));
  return w;
}

CommandAsrAdapter::CommandAsrAdapter(CommandOptions opts) : opts_(std::move(opts)) {
  if (opts_.command.find("{input}") == std::string::npos)
    throw ConfigError("ASR command template lacks {input}");
  if (!opts_.cache_dir.empty()) fs::create_directories(opts_.cache_dir);
}

Transcript CommandAsrAdapter::Recognize(const Manifest &, const ManifestRecord &rec,
                                        const Waveform &input) {
  const std::string wav = WavBytes(input);
  std::string cache_file;
  if (!opts_.cache_dir.empty()) {
    const std::string cmd_key = Expand(
        opts_.command, {{"utt", rec.utt_id}, {"manifest", opts_.manifest_path}});
    const std::string key = Sha256Hex("asr\n" + cmd_key + '\0' + Sha256Hex(wav));
    cache_file = (fs::path(opts_.cache_dir) / (key + ".txt")).string();
    if (fs::exists(cache_file)) return Transcript::FromUtf8(Slurp(cache_file));
  }

  ScratchDir scratch;
  const std::string in_path = scratch.File("in.wav");
  WriteAtomically(in_path, wav);
  const std::string out_path = scratch.File("out.txt");
  const std::string cmd = Expand(opts_.command, {{"input", in_path},
                                                  {"output", out_path},
                                                  {"utt", rec.utt_id},
                                                  {"manifest", opts_.manifest_path}});
  const ProcessResult r = RunShell(cmd, opts_.timeout);
  CheckRun(r, rec.utt_id);
  std::string text;
  if (opts_.command.find("{output}") != std::string::npos) {
    if (!fs::exists(out_path)) throw AdapterError(rec.utt_id, "ASR wrote no output");
    text = Slurp(out_path);
  } else {
    text = r.stdout_text;
  }
  Transcript t;
  try {
    t = Transcript::FromUtf8(text);
  } catch (const InvalidInput &e) {
    throw AdapterError(rec.utt_id, std::string("bad ASR output: ") + e.what());
  }
  if (!cache_file.empty()) WriteAtomically(cache_file, text);
  return t;
}

Waveform SurrogateSeAdapter::Extract(const Manifest &manifest, const ManifestRecord &rec,
                                     ExtractRole role) {
  const Waveform s = LoadComponent(manifest, rec.target);
  const Waveform i = LoadComponent(manifest, rec.interference);
  const Waveform n = LoadComponent(manifest, rec.noise);
  if (role == ExtractRole::kTarget) return SurrogateEnhance(s, i, n, rec.artifact_strength, cfg_);
  return SurrogateEnhance(i, s, n, rec.artifact_strength, cfg_);
}

DistortionScores SurrogateAsrAdapter::Score(const Manifest &manifest, const ManifestRecord &rec,
                                            const Waveform &input) const {
  const Waveform s = LoadComponent(manifest, rec.target);
  const Waveform i = LoadComponent(manifest, rec.interference);
  const Waveform n = LoadComponent(manifest, rec.noise);
  return ScoreDistortion(Quantize16(input), s, i, n, cfg_);
}

Transcript SurrogateAsrAdapter::Recognize(const Manifest &manifest, const ManifestRecord &rec,
                                          const Waveform &input) {
  DistortionScores sc;
  try {
    sc = Score(manifest, rec, input);
  } catch (const UndefinedRatio &e) {
    throw AdapterError(rec.utt_id, e.what());
  }
  return CorruptTranscript(Transcript::FromUtf8(rec.transcript), sc.error_rate, seed_,
                           rec.utt_id);
}

std::unique_ptr<SeAdapter> MakeSeAdapter(const std::string &choice, CommandOptions opts,
                                         const SurrogateConfig &cfg) {
  if (choice.empty()) throw ConfigError("no SE adapter given (--se-cmd)");
  if (choice == "surrogate") return std::make_unique<SurrogateSeAdapter>(cfg);
  opts.command = choice;
  return std::make_unique<CommandSeAdapter>(std::move(opts));
}

std::unique_ptr<AsrAdapter> MakeAsrAdapter(const std::string &choice, CommandOptions opts,
                                           std::uint64_t seed, const SurrogateConfig &cfg) {
  if (choice.empty()) throw ConfigError("no ASR adapter given (--asr-cmd)");
  if (choice == "surrogate") return std::make_unique<SurrogateAsrAdapter>(cfg, seed);
  opts.command = choice;
  return std::make_unique<CommandAsrAdapter>(std::move(opts));
}

}  // namespace switchasr
