// core/src/manifest.cc

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

#include "switchasr/manifest.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "switchasr/error.h"

namespace switchasr {

namespace {

namespace fs = std::filesystem;

constexpr const char *kHeader = "#switchasr-manifest";

std::string Escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '%' || c == '\t' || c == '\n' || c == '\r') {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string Unescape(const std::string &s, std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    unsigned v = 0;
    if (i + 2 >= s.size() || !std::isxdigit(static_cast<unsigned char>(s[i + 1])) ||
        !std::isxdigit(static_cast<unsigned char>(s[i + 2])) ||
        std::sscanf(s.c_str() + i + 1, "%2X", &v) != 1)
      throw FormatError("manifest line " + std::to_string(line) + ": bad escape");
    out.push_back(static_cast<char>(v));
    i += 2;
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string &s, const std::string &key, std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception &) {
    pos = std::string::npos;
  }
  if (pos != s.size())
    throw FormatError("manifest line " + std::to_string(line) + ": bad number for '" +
                      key + "'");
  return v;
}

}  // namespace

std::string Manifest::Resolve(const std::string &stored) const {
  const fs::path p(stored);
  if (p.is_absolute() || base_dir_.empty()) return p.string();
  return (base_dir_ / p).lexically_normal().string();
}

std::string Manifest::Relativize(const std::string &path) const {
  if (base_dir_.empty()) return path;
  const fs::path abs = fs::absolute(path).lexically_normal();
  const fs::path base = fs::absolute(base_dir_).lexically_normal();
  const fs::path rel = abs.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") return abs.string();
  return rel.string();
}

const ManifestRecord &Manifest::Find(const std::string &utt_id) const {
  for (const auto &r : records_)
    if (r.utt_id == utt_id) return r;
  throw InvalidInput("utterance '" + utt_id + "' not in manifest");
}

void Manifest::Write(std::ostream &os) const {
  os << kHeader << "\tversion=" << kVersion << '\n';
  for (const auto &r : records_) {
    auto kv = [&os](const char *k, const std::string &v) { os << k << '=' << Escape(v); };
    kv("utt", r.utt_id);
    os << '\t';
    kv("spk", r.target_speaker);
    os << '\t';
    kv("ispk", r.interferer_speaker);
    os << "\tsir_db=" << FormatDouble(r.true_sir_db) << "\tsnr_db=" << FormatDouble(r.true_snr_db)
       << "\tpeak_gain=" << FormatDouble(r.peak_gain)
       << "\tartifact=" << FormatDouble(r.artifact_strength) << '\t';
    kv("mix", r.mixture);
    os << '\t';
    kv("target", r.target);
    os << '\t';
    kv("interf", r.interference);
    os << '\t';
    kv("noise", r.noise);
    os << '\t';
    kv("enroll", r.enrollment_target);
    if (r.enrollment_interferer) {
      os << '\t';
      kv("ienroll", *r.enrollment_interferer);
    }
    if (r.enhanced) {
      os << '\t';
      kv("enh", *r.enhanced);
    }
    if (r.enhanced_interferer) {
      os << '\t';
      kv("ienh", *r.enhanced_interferer);
    }
    os << '\t';
    kv("text", r.transcript);
    os << '\n';
  }
}

void Manifest::Save(const std::string &path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw InvalidInput("cannot write manifest '" + path + "'");
    Write(os);
    if (!os) throw InvalidInput("cannot write manifest '" + path + "'");
  }
  fs::rename(tmp, path);
}

Manifest Manifest::Read(std::istream &is, fs::path base_dir) {
  Manifest m(std::move(base_dir));
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw FormatError("empty manifest");
  ++lineno;
  {
    const std::string expect = std::string(kHeader) + "\tversion=";
    if (line.rfind(expect, 0) != 0) throw FormatError("missing manifest header");
    if (line.substr(expect.size()) != std::to_string(kVersion))
      throw FormatError("unsupported manifest version '" + line.substr(expect.size()) + "'");
  }
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::map<std::string, std::string> kv;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos)
        throw FormatError("manifest line " + std::to_string(lineno) + ": field without '='");
      kv[field.substr(0, eq)] = Unescape(field.substr(eq + 1), lineno);
    }
    auto req = [&](const char *k) -> const std::string & {
      auto it = kv.find(k);
      if (it == kv.end())
        throw FormatError("manifest line " + std::to_string(lineno) + ": missing '" + k + "'");
      return it->second;
    };
    auto opt = [&](const char *k) -> std::optional<std::string> {
      auto it = kv.find(k);
      if (it == kv.end()) return std::nullopt;
      return it->second;
    };
    ManifestRecord r;
    r.utt_id = req("utt");
    r.target_speaker = req("spk");
    r.interferer_speaker = req("ispk");
    r.true_sir_db = ParseDouble(req("sir_db"), "sir_db", lineno);
    r.true_snr_db = ParseDouble(req("snr_db"), "snr_db", lineno);
    r.peak_gain = ParseDouble(req("peak_gain"), "peak_gain", lineno);
    r.artifact_strength = ParseDouble(req("artifact"), "artifact", lineno);
    r.mixture = req("mix");
    r.target = req("target");
    r.interference = req("interf");
    r.noise = req("noise");
    r.enrollment_target = req("enroll");
    r.enrollment_interferer = opt("ienroll");
    r.enhanced = opt("enh");
    r.enhanced_interferer = opt("ienh");
    r.transcript = req("text");
    if (!seen.insert(r.utt_id).second)
      throw FormatError("duplicate utterance id '" + r.utt_id + "'");
    m.records_.push_back(std::move(r));
  }
  return m;
}

Manifest Manifest::Load(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open manifest '" + path + "'");
  return Read(is, fs::absolute(path).parent_path());
}

}  // namespace switchasr
