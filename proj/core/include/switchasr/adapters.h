// core/include/switchasr/adapters.h

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

#ifndef SWITCHASR_ADAPTERS_H_
#define SWITCHASR_ADAPTERS_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "switchasr/manifest.h"
#include "switchasr/surrogate.h"
#include "switchasr/transcript.h"
#include "switchasr/waveform.h"

namespace switchasr {

enum class ExtractRole { kTarget, kInterferer };

/// Target-speaker extraction: mixture + enrollment of one speaker -> that
/// speaker's estimate.
class SeAdapter {
 public:
  virtual ~SeAdapter() = default;
  virtual Waveform Extract(const Manifest &manifest, const ManifestRecord &rec,
                           ExtractRole role) = 0;
};

class AsrAdapter {
 public:
  virtual ~AsrAdapter() = default;
  virtual Transcript Recognize(const Manifest &manifest, const ManifestRecord &rec,
                               const Waveform &input) = 0;
};

// External tools are shell command templates. Placeholders, each replaced by
// a shell-quoted value:
//   {input}     input wav (mixture for SE, signal to recognize for ASR)
//   {enroll}    enrollment wav (SE only)
//   {output}    file the tool must write (wav for SE; transcript for ASR)
//   {utt}       utterance id
//   {manifest}  manifest path
// An ASR template without {output} is read from stdout.
struct CommandOptions {
  std::string command;
  std::string manifest_path;
  std::string cache_dir;  // empty disables caching
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
};

/// Hex SHA-256 of `data`.
std::string Sha256Hex(const std::string &data);

class CommandSeAdapter : public SeAdapter {
 public:
  explicit CommandSeAdapter(CommandOptions opts);
  Waveform Extract(const Manifest &manifest, const ManifestRecord &rec,
                   ExtractRole role) override;

 private:
  CommandOptions opts_;
};

class CommandAsrAdapter : public AsrAdapter {
 public:
  explicit CommandAsrAdapter(CommandOptions opts);
  Transcript Recognize(const Manifest &manifest, const ManifestRecord &rec,
                       const Waveform &input) override;

 private:
  CommandOptions opts_;
};

/// In-process surrogate enhancer working from the manifest's clean
/// components. Interferer extraction swaps the roles of target and
/// interference.
class SurrogateSeAdapter : public SeAdapter {
 public:
  explicit SurrogateSeAdapter(SurrogateConfig cfg = {}) : cfg_(cfg) {}
  Waveform Extract(const Manifest &manifest, const ManifestRecord &rec,
                   ExtractRole role) override;

 private:
  SurrogateConfig cfg_;
};

/// In-process surrogate recognizer. The input is first quantized to 16 bits
/// so results match the same recognizer run through a wav file.
class SurrogateAsrAdapter : public AsrAdapter {
 public:
  SurrogateAsrAdapter(SurrogateConfig cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {}
  Transcript Recognize(const Manifest &manifest, const ManifestRecord &rec,
                       const Waveform &input) override;

  DistortionScores Score(const Manifest &manifest, const ManifestRecord &rec,
                         const Waveform &input) const;

 private:
  SurrogateConfig cfg_;
  std::uint64_t seed_;
};

/// "surrogate" selects the in-process surrogate; anything else is a command
/// template.
std::unique_ptr<SeAdapter> MakeSeAdapter(const std::string &choice, CommandOptions opts,
                                         const SurrogateConfig &cfg = {});
std::unique_ptr<AsrAdapter> MakeAsrAdapter(const std::string &choice, CommandOptions opts,
                                           std::uint64_t seed, const SurrogateConfig &cfg = {});

}  // namespace switchasr

#endif  // SWITCHASR_ADAPTERS_H_
