// core/src/wav_io.cc

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

#include "switchasr/wav_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "switchasr/error.h"

namespace switchasr {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}
uint16_t ReadU16(const unsigned char *p) {
  return uint16_t(p[0] | (p[1] << 8));
}

void PutU32(std::ostream &os, uint32_t v) {
  const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff),
                     char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  os.write(b, 4);
}
void PutU16(std::ostream &os, uint16_t v) {
  const char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  os.write(b, 2);
}

void ReadExact(std::istream &is, unsigned char *buf, std::size_t n,
               const char *what) {
  is.read(reinterpret_cast<char *>(buf), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw FormatError(std::string("wav: truncated ") + what);
}

int16_t ToPcm(double s) {
  const double v = std::nearbyint(s * 32768.0);
  return static_cast<int16_t>(std::clamp(v, -32768.0, 32767.0));
}

}  // namespace

Waveform ReadWav(std::istream &is) {
  unsigned char riff[12];
  ReadExact(is, riff, 12, "RIFF header");
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw FormatError("wav: not a RIFF/WAVE stream");

  bool have_fmt = false;
  int sample_rate = 0;
  while (true) {
    unsigned char chunk[8];
    ReadExact(is, chunk, 8, "chunk header");
    const uint32_t size = ReadU32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: fmt chunk too small");
      std::vector<unsigned char> fmt(size + (size & 1));
      ReadExact(is, fmt.data(), fmt.size(), "fmt chunk");
      const uint16_t tag = ReadU16(&fmt[0]);
      const uint16_t channels = ReadU16(&fmt[2]);
      sample_rate = static_cast<int>(ReadU32(&fmt[4]));
      const uint16_t bits = ReadU16(&fmt[14]);
      if (tag != 1) throw FormatError("wav: only PCM (format tag 1) supported");
      if (channels != 1) throw FormatError("wav: expected mono");
      if (bits != 16) throw FormatError("wav: expected 16-bit samples");
      if (sample_rate <= 0) throw FormatError("wav: invalid sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError("wav: odd data size");
      std::vector<unsigned char> raw(size);
      ReadExact(is, raw.data(), raw.size(), "sample data");
      std::vector<double> samples(size / 2);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto v = static_cast<int16_t>(ReadU16(&raw[2 * i]));
        samples[i] = v / 32768.0;
      }
      return Waveform(std::move(samples), sample_rate);
    } else {
      is.ignore(size + (size & 1));
      if (!is) throw FormatError("wav: truncated chunk");
    }
  }
}

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open wav file '" + path + "'");
  try {
    return ReadWav(is);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteWav(const Waveform &w, std::ostream &os) {
  const auto data_bytes = static_cast<uint32_t>(w.size() * 2);
  os.write("RIFF", 4);
  PutU32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  PutU32(os, 16);
  PutU16(os, 1);
  PutU16(os, 1);
  PutU32(os, static_cast<uint32_t>(w.sample_rate()));
  PutU32(os, static_cast<uint32_t>(w.sample_rate()) * 2);
  PutU16(os, 2);
  PutU16(os, 16);
  os.write("data", 4);
  PutU32(os, data_bytes);
  std::vector<char> raw(data_bytes);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto v = static_cast<uint16_t>(ToPcm(w[i]));
    raw[2 * i] = char(v & 0xff);
    raw[2 * i + 1] = char(v >> 8);
  }
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void WriteWav(const Waveform &w, const std::string &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot write wav file '" + path + "'");
  WriteWav(w, os);
  if (!os) throw InvalidInput("write failed for '" + path + "'");
}

Waveform Quantize16(const Waveform &w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = ToPcm(w[i]) / 32768.0;
  return Waveform(std::move(out), w.sample_rate());
}

}  // namespace switchasr
