// tests/unit/transcript_metrics_test.cc

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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "switchasr/error.h"
#include "switchasr/transcript.h"

namespace switchasr {
namespace {

std::size_t Recursive(std::u32string_view a, std::u32string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t sub = Recursive(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
  return std::min({sub, Recursive(a.substr(1), b) + 1, Recursive(a, b.substr(1)) + 1});
}

std::vector<std::u32string> AllStrings(int max_len) {
  std::vector<std::u32string> out{U""};
  std::vector<std::u32string> frontier{U""};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::u32string> next;
    for (const auto &s : frontier)
      for (char32_t c : {U'a', U'b', U'c'}) next.push_back(s + c);
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

Transcript T(const char *s) { return Transcript::FromUtf8(s); }

TEST(EditDistance, HandValues) {
  EXPECT_EQ(EditDistance(T("abc"), T("abc")), 0u);
  EXPECT_EQ(EditDistance(T(""), T("abc")), 3u);
  EXPECT_EQ(EditDistance(T("kitten"), T("sitting")), 3u);
}

TEST(EditDistance, MatchesRecursionOnShortStrings) {
  // Lengths up to 4 here; the acceptance run covers length 6.
  const auto all = AllStrings(4);
  for (const auto &a : all)
    for (const auto &b : all) ASSERT_EQ(EditDistance(a, b), Recursive(a, b));
}

TEST(EditDistance, MetricAxiomsOnSample) {
  const auto all = AllStrings(3);
  for (const auto &a : all)
    for (const auto &b : all) {
      ASSERT_EQ(EditDistance(a, b), EditDistance(b, a));
      ASSERT_EQ(EditDistance(a, b) == 0, a == b);
      for (const auto &c : {std::u32string(U"ab"), std::u32string(U"cba")})
        ASSERT_LE(EditDistance(a, b), EditDistance(a, c) + EditDistance(c, b));
    }
}

TEST(Cer, HandValues) {
  EXPECT_DOUBLE_EQ(Cer(T("abcd"), T("abxd")), 0.25);
  EXPECT_DOUBLE_EQ(Cer(T("ab"), T("")), 1.0);
  EXPECT_DOUBLE_EQ(Cer(T("ab"), T("abcdef")), 2.0);
  EXPECT_DOUBLE_EQ(Cer(T("こんにちは"), T("こんにちは")), 0.0);
  EXPECT_THROW(Cer(T(""), T("a")), InvalidInput);
  EXPECT_THROW(Cer(T("   "), T("a")), InvalidInput);
}

TEST(CerStats, MicroAverage) {
  CerStats total;
  total += ScoreCer(T("abcd"), T("abxd"));  // 1 / 4
  total += ScoreCer(T("ab"), T(""));        // 2 / 2
  EXPECT_EQ(total.errors, 3u);
  EXPECT_EQ(total.ref_length, 6u);
  EXPECT_DOUBLE_EQ(total.Rate(), 0.5);
}

TEST(Transcript, Normalization) {
  // Decomposed e + combining acute composes to U+00E9.
  EXPECT_EQ(T("e\xCC\x81").chars(), std::u32string(U"é"));
  EXPECT_EQ(T("  a \t\n b  c ").chars(), std::u32string(U"a b c"));
  // Ideographic space counts as whitespace.
  EXPECT_EQ(T("\xE3\x80\x80x\xE3\x80\x80\xE3\x80\x80y").chars(), std::u32string(U"x y"));
  EXPECT_EQ(T("あいう").ToUtf8(), "あいう");
  EXPECT_THROW(T("\xFF\xFE"), InvalidInput);
  EXPECT_THROW(T("\xE3\x81"), InvalidInput);
}

TEST(MakeLabel, Branches) {
  SwitchLabel l = MakeLabelFromCers(0.1, 0.3);
  EXPECT_EQ(l.p0, 1.0);
  EXPECT_EQ(l.p1, 0.0);
  EXPECT_FALSE(l.tie);
  l = MakeLabelFromCers(0.3, 0.1);
  EXPECT_EQ(l.p0, 0.0);
  EXPECT_EQ(l.p1, 1.0);
  EXPECT_FALSE(l.tie);
  l = MakeLabelFromCers(0.2, 0.2);
  EXPECT_EQ(l.p0, 0.0);
  EXPECT_EQ(l.p1, 1.0);
  EXPECT_TRUE(l.tie);

  l = MakeLabel(T("abcd"), T("abcd"), T("abxd"));
  EXPECT_EQ(l.bit(), 0);
  l = MakeLabel(T("abcd"), T("xbcd"), T("abxd"));
  EXPECT_EQ(l.bit(), 1);
  EXPECT_TRUE(l.tie);
}

TEST(MakeLabel, CommonPrefixFollowsTheStrictDefinition) {
  // A shared prefix lowers both CERs; the label is still whatever the raw
  // comparison of the new CERs gives.
  const auto all = AllStrings(3);
  for (const auto &w : all) {
    if (w.empty()) continue;
    for (const auto &y : all)
      for (const auto &s : {std::u32string(U"a"), std::u32string(U"bc")}) {
        const std::u32string p = U"ccc";
        const double cy = static_cast<double>(EditDistance(p + w, p + y)) / (p + w).size();
        const double cs = static_cast<double>(EditDistance(p + w, p + s)) / (p + w).size();
        const SwitchLabel l = MakeLabelFromCers(cy, cs);
        ASSERT_EQ(l.bit(), cy < cs ? 0 : 1);
        ASSERT_EQ(l.tie, cy == cs);
      }
  }
}

TEST(FilterTies, Counts) {
  auto rec = [](const char *id, bool tie) {
    return LabeledRecord{id, SwitchLabel::FromBit(1, tie), 0.1, 0.1};
  };
  std::vector<LabeledRecord> r{rec("a", false), rec("b", true), rec("c", false),
                               rec("d", true), rec("e", false)};
  const auto kept = FilterTies(r);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].utt_id, "a");
  EXPECT_EQ(kept[1].utt_id, "c");
  EXPECT_EQ(kept[2].utt_id, "e");
  EXPECT_EQ(FilterTies(kept).size(), 3u);
  EXPECT_TRUE(FilterTies({rec("x", true), rec("y", true)}).empty());
}

TEST(LabelFile, RoundTripAndErrors) {
  std::vector<LabeledRecord> r{{"u1", MakeLabelFromCers(0.1, 0.3), 0.1, 0.3},
                               {"u2", MakeLabelFromCers(0.25, 0.25), 0.25, 0.25}};
  std::stringstream ss;
  WriteLabels(r, ss);
  EXPECT_EQ(ss.str(), "u1\t0\t0\t0.1\t0.3\nu2\t1\t1\t0.25\t0.25\n");
  const auto back = ReadLabels(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].utt_id, "u1");
  EXPECT_EQ(back[0].label.bit(), 0);
  EXPECT_TRUE(back[1].label.tie);
  EXPECT_DOUBLE_EQ(back[1].cer_enhanced, 0.25);
  std::stringstream bad("u1\t2\t0\t0.1\t0.3\n");
  EXPECT_THROW(ReadLabels(bad), FormatError);
  std::stringstream short_line("u1\t0\t0\n");
  EXPECT_THROW(ReadLabels(short_line), FormatError);
}

}  // namespace
}  // namespace switchasr
