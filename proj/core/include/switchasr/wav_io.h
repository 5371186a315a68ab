// core/include/switchasr/wav_io.h

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

#ifndef SWITCHASR_WAV_IO_H_
#define SWITCHASR_WAV_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "switchasr/waveform.h"

namespace switchasr {

// RIFF/WAVE, PCM format tag 1, mono, 16-bit signed little-endian.
// Samples are scaled by 1/32768 on read; writing rounds to the nearest code
// and saturates at [-32768, 32767].

Waveform ReadWav(std::istream &is);
Waveform ReadWav(const std::string &path);

void WriteWav(const Waveform &w, std::ostream &os);
void WriteWav(const Waveform &w, const std::string &path);

/// Round-trips a waveform through 16-bit quantization.
Waveform Quantize16(const Waveform &w);

}  // namespace switchasr

#endif  // SWITCHASR_WAV_IO_H_
