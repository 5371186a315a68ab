// core/include/switchasr/manifest.h

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

#ifndef SWITCHASR_MANIFEST_H_
#define SWITCHASR_MANIFEST_H_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace switchasr {

/// One simulated mixture. Paths are stored relative to the manifest
/// directory whenever they lie under it.
struct ManifestRecord {
  std::string utt_id;
  std::string target_speaker;
  std::string interferer_speaker;

  std::string mixture;
  std::string target;
  std::string interference;
  std::string noise;
  std::string enrollment_target;
  std::optional<std::string> enrollment_interferer;
  std::optional<std::string> enhanced;
  std::optional<std::string> enhanced_interferer;

  std::string transcript;  // UTF-8 reference
  double true_sir_db = 0.0;
  double true_snr_db = 0.0;
  double peak_gain = 1.0;          // applied to every exported component
  double artifact_strength = 0.0;  // surrogate enhancer alpha
};

class Manifest {
 public:
  static constexpr int kVersion = 1;

  Manifest() = default;
  explicit Manifest(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  std::vector<ManifestRecord> &records() { return records_; }
  const std::vector<ManifestRecord> &records() const { return records_; }
  const std::filesystem::path &base_dir() const { return base_dir_; }

  /// Absolute path of a stored (possibly relative) path.
  std::string Resolve(const std::string &stored) const;
  /// Inverse of Resolve: relative to base_dir when below it.
  std::string Relativize(const std::string &path) const;

  const ManifestRecord &Find(const std::string &utt_id) const;

  void Write(std::ostream &os) const;
  /// Writes to `path` atomically (temp file + rename).
  void Save(const std::string &path) const;

  /// Throws FormatError on malformed lines, unknown version, duplicate ids or
  /// missing required fields.
  static Manifest Read(std::istream &is, std::filesystem::path base_dir);
  static Manifest Load(const std::string &path);

 private:
  std::filesystem::path base_dir_;
  std::vector<ManifestRecord> records_;
};

}  // namespace switchasr

#endif  // SWITCHASR_MANIFEST_H_
