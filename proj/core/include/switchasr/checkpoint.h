// core/include/switchasr/checkpoint.h

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

#ifndef SWITCHASR_CHECKPOINT_H_
#define SWITCHASR_CHECKPOINT_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "switchasr/model.h"

namespace switchasr {

// Binary layout, all integers and reals little-endian:
//   8 bytes   magic "SWCHCKPT"
//   uint32    format version (1)
//   uint32 x6 input_dim, hidden, layers, attn_dim, fc_hidden, classes
//   uint64    parameter count
//   float64   parameters, in ParamLayout order
//   uint32    normalizer dimension (0 = none)
//   float64   mean[dim], then inv_std[dim]

inline constexpr unsigned kCheckpointVersion = 1;

void SaveCheckpoint(const SwitchModel &model, std::ostream &os);
void SaveCheckpoint(const SwitchModel &model, const std::string &path);

/// Throws FormatError on a corrupt or truncated stream and
/// ArchitectureMismatch when `expected` is given and differs from the file.
SwitchModel LoadCheckpoint(std::istream &is,
                           const std::optional<Architecture> &expected = std::nullopt);
SwitchModel LoadCheckpoint(const std::string &path,
                           const std::optional<Architecture> &expected = std::nullopt);

}  // namespace switchasr

#endif  // SWITCHASR_CHECKPOINT_H_
