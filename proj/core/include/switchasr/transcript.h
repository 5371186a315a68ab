// core/include/switchasr/transcript.h

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

#ifndef SWITCHASR_TRANSCRIPT_H_
#define SWITCHASR_TRANSCRIPT_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace switchasr {

/// Sequence of Unicode scalar values after scoring normalization: NFC, leading
/// and trailing whitespace stripped, internal whitespace runs collapsed to a
/// single U+0020.
class Transcript {
 public:
  Transcript() = default;
  /// Decodes and normalizes UTF-8. Throws InvalidInput on malformed input.
  static Transcript FromUtf8(std::string_view text);

  const std::u32string &chars() const { return chars_; }
  std::size_t size() const { return chars_.size(); }
  bool empty() const { return chars_.empty(); }
  std::string ToUtf8() const;

  friend bool operator==(const Transcript &, const Transcript &) = default;

 private:
  std::u32string chars_;
};

std::string Utf32ToUtf8(std::u32string_view chars);

/// Levenshtein distance with unit costs.
std::size_t EditDistance(std::u32string_view a, std::u32string_view b);
std::size_t EditDistance(const Transcript &a, const Transcript &b);

/// Edit-distance tally for micro-averaged (corpus) CER.
struct CerStats {
  std::size_t errors = 0;
  std::size_t ref_length = 0;

  double Rate() const;
  CerStats &operator+=(const CerStats &o) {
    errors += o.errors;
    ref_length += o.ref_length;
    return *this;
  }
};

CerStats ScoreCer(const Transcript &reference, const Transcript &hypothesis);

/// edit_distance / |reference|. Throws InvalidInput on an empty reference.
double Cer(const Transcript &reference, const Transcript &hypothesis);

/// One-hot switch target: p = [1,0] when the mixture was strictly better for
/// ASR, [0,1] otherwise. `tie` marks equal CERs.
struct SwitchLabel {
  double p0 = 0.0;
  double p1 = 1.0;
  bool tie = false;

  /// 0 = mixture better, 1 = enhanced better or tie.
  int bit() const { return p0 > 0.5 ? 0 : 1; }
  static SwitchLabel FromBit(int bit, bool tie = false);
};

SwitchLabel MakeLabelFromCers(double cer_mixture, double cer_enhanced);
SwitchLabel MakeLabel(const Transcript &reference, const Transcript &hyp_mixture,
                      const Transcript &hyp_enhanced);

struct LabeledRecord {
  std::string utt_id;
  SwitchLabel label;
  double cer_mixture = 0.0;
  double cer_enhanced = 0.0;
};

/// Drops tied records, preserving order.
std::vector<LabeledRecord> FilterTies(const std::vector<LabeledRecord> &records);

// Labeled dataset file: one record per line,
//   utt_id <TAB> label_bit <TAB> tie_bit <TAB> cer_mixture <TAB> cer_enhanced
void WriteLabels(const std::vector<LabeledRecord> &records, std::ostream &os);
std::vector<LabeledRecord> ReadLabels(std::istream &is);
void WriteLabels(const std::vector<LabeledRecord> &records, const std::string &path);
std::vector<LabeledRecord> ReadLabels(const std::string &path);

}  // namespace switchasr

#endif  // SWITCHASR_TRANSCRIPT_H_
