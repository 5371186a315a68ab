// core/src/transcript.cc

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

#include "switchasr/transcript.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "switchasr/error.h"

namespace switchasr {

namespace {

bool IsSpace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

Transcript Transcript::FromUtf8(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");

  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  // fromUTF8 maps invalid sequences to U+FFFD; reject them unless the
  // caller really wrote U+FFFD.
  if (src.indexOf(static_cast<UChar>(0xFFFD)) >= 0 &&
      text.find("\xEF\xBF\xBD") == std::string_view::npos)
    throw InvalidInput("transcript is not valid UTF-8");

  const icu::UnicodeString norm = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");

  std::u32string raw(static_cast<std::size_t>(norm.countChar32()), U'\0');
  UErrorCode s2 = U_ZERO_ERROR;
  norm.toUTF32(reinterpret_cast<UChar32 *>(raw.data()),
               static_cast<int32_t>(raw.size()), s2);

  Transcript t;
  bool pending_space = false;
  for (char32_t c : raw) {
    if (IsSpace(c)) {
      pending_space = !t.chars_.empty();
      continue;
    }
    if (pending_space) t.chars_.push_back(U' ');
    pending_space = false;
    t.chars_.push_back(c);
  }
  return t;
}

std::string Utf32ToUtf8(std::u32string_view chars) {
  const icu::UnicodeString u = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32 *>(chars.data()), static_cast<int32_t>(chars.size()));
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string Transcript::ToUtf8() const { return Utf32ToUtf8(chars_); }

std::size_t EditDistance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t EditDistance(const Transcript &a, const Transcript &b) {
  return EditDistance(a.chars(), b.chars());
}

double CerStats::Rate() const {
  if (ref_length == 0) throw InvalidInput("CER with empty reference");
  return static_cast<double>(errors) / static_cast<double>(ref_length);
}

CerStats ScoreCer(const Transcript &reference, const Transcript &hypothesis) {
  if (reference.empty()) throw InvalidInput("CER with empty reference");
  return {EditDistance(reference, hypothesis), reference.size()};
}

double Cer(const Transcript &reference, const Transcript &hypothesis) {
  return ScoreCer(reference, hypothesis).Rate();
}

SwitchLabel SwitchLabel::FromBit(int bit, bool tie) {
  SwitchLabel l;
  l.p0 = bit == 0 ? 1.0 : 0.0;
  l.p1 = 1.0 - l.p0;
  l.tie = tie;
  return l;
}

SwitchLabel MakeLabelFromCers(double cer_mixture, double cer_enhanced) {
  return SwitchLabel::FromBit(cer_mixture < cer_enhanced ? 0 : 1,
                              cer_mixture == cer_enhanced);
}

SwitchLabel MakeLabel(const Transcript &reference, const Transcript &hyp_mixture,
                      const Transcript &hyp_enhanced) {
  return MakeLabelFromCers(Cer(reference, hyp_mixture),
                           Cer(reference, hyp_enhanced));
}

std::vector<LabeledRecord> FilterTies(const std::vector<LabeledRecord> &records) {
  std::vector<LabeledRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const LabeledRecord &r) { return !r.label.tie; });
  return out;
}

void WriteLabels(const std::vector<LabeledRecord> &records, std::ostream &os) {
  for (const auto &r : records) {
    os << r.utt_id << '\t' << r.label.bit() << '\t' << (r.label.tie ? 1 : 0)
       << '\t' << FormatReal(r.cer_mixture) << '\t'
       << FormatReal(r.cer_enhanced) << '\n';
  }
}

std::vector<LabeledRecord> ReadLabels(std::istream &is) {
  std::vector<LabeledRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 5)
      throw FormatError("labels line " + std::to_string(lineno) +
                        ": expected 5 tab-separated fields");
    LabeledRecord r;
    r.utt_id = fields[0];
    try {
      const int bit = std::stoi(fields[1]);
      const int tie = std::stoi(fields[2]);
      if ((bit != 0 && bit != 1) || (tie != 0 && tie != 1))
        throw FormatError("bad bit");
      r.label = SwitchLabel::FromBit(bit, tie == 1);
      r.cer_mixture = std::stod(fields[3]);
      r.cer_enhanced = std::stod(fields[4]);
    } catch (const std::logic_error &) {
      throw FormatError("labels line " + std::to_string(lineno) +
                        ": unparsable field");
    } catch (const FormatError &) {
      throw FormatError("labels line " + std::to_string(lineno) +
                        ": label/tie bits must be 0 or 1");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void WriteLabels(const std::vector<LabeledRecord> &records, const std::string &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInput("cannot write '" + path + "'");
  WriteLabels(records, os);
}

std::vector<LabeledRecord> ReadLabels(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  return ReadLabels(is);
}

}  // namespace switchasr
