// core/src/checkpoint.cc

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

#include "switchasr/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "switchasr/error.h"

namespace switchasr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'W', 'C', 'H', 'C', 'K', 'P', 'T'};

template <class T>
void Put(std::ostream &os, const T &v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
T Get(std::istream &is, const char *what) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (is.gcount() != static_cast<std::streamsize>(sizeof(T)))
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  return v;
}

void GetDoubles(std::istream &is, double *dst, std::size_t n, const char *what) {
  const auto bytes = static_cast<std::streamsize>(n * sizeof(double));
  is.read(reinterpret_cast<char *>(dst), bytes);
  if (is.gcount() != bytes)
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
}

std::string Describe(const Architecture &a) {
  return "in=" + std::to_string(a.input_dim) + " hidden=" + std::to_string(a.hidden) +
         " layers=" + std::to_string(a.layers) + " attn=" + std::to_string(a.attn_dim) +
         " fc=" + std::to_string(a.fc_hidden) + " classes=" + std::to_string(a.classes);
}

}  // namespace

void SaveCheckpoint(const SwitchModel &model, std::ostream &os) {
  const Architecture &a = model.params.arch();
  os.write(kMagic, sizeof(kMagic));
  Put<uint32_t>(os, kCheckpointVersion);
  for (int v : {a.input_dim, a.hidden, a.layers, a.attn_dim, a.fc_hidden, a.classes})
    Put<uint32_t>(os, static_cast<uint32_t>(v));
  Put<uint64_t>(os, model.params.size());
  os.write(reinterpret_cast<const char *>(model.params.values().data()),
           static_cast<std::streamsize>(model.params.size() * sizeof(double)));
  const auto dim = static_cast<uint32_t>(model.normalizer.mean.size());
  Put<uint32_t>(os, dim);
  if (dim > 0) {
    os.write(reinterpret_cast<const char *>(model.normalizer.mean.data()),
             static_cast<std::streamsize>(dim * sizeof(double)));
    os.write(reinterpret_cast<const char *>(model.normalizer.inv_std.data()),
             static_cast<std::streamsize>(dim * sizeof(double)));
  }
}

void SaveCheckpoint(const SwitchModel &model, const std::string &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot write checkpoint '" + path + "'");
  SaveCheckpoint(model, os);
  if (!os) throw InvalidInput("write failed for checkpoint '" + path + "'");
}

SwitchModel LoadCheckpoint(std::istream &is, const std::optional<Architecture> &expected) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (is.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw FormatError("not a switch-model checkpoint (bad magic)");
  const auto version = Get<uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  Architecture a;
  int *fields[] = {&a.input_dim, &a.hidden, &a.layers, &a.attn_dim, &a.fc_hidden, &a.classes};
  for (int *f : fields) *f = static_cast<int>(Get<uint32_t>(is, "architecture"));
  try {
    a.Validate();
  } catch (const InvalidInput &e) {
    throw FormatError(std::string("checkpoint architecture invalid: ") + e.what());
  }
  if (expected && !(*expected == a))
    throw ArchitectureMismatch("checkpoint architecture (" + Describe(a) +
                               ") differs from expected (" + Describe(*expected) + ")");

  SwitchModel model{ModelParams(a), {}};
  const auto count = Get<uint64_t>(is, "parameter count");
  if (count != model.params.size())
    throw FormatError("checkpoint parameter count " + std::to_string(count) +
                      " does not match architecture (" +
                      std::to_string(model.params.size()) + ")");
  GetDoubles(is, model.params.values().data(), model.params.size(), "parameters");
  const auto dim = Get<uint32_t>(is, "normalizer dimension");
  if (dim != 0) {
    if (dim != static_cast<uint32_t>(a.input_dim))
      throw FormatError("checkpoint normalizer dimension mismatch");
    model.normalizer.mean.resize(dim);
    model.normalizer.inv_std.resize(dim);
    GetDoubles(is, model.normalizer.mean.data(), dim, "normalizer mean");
    GetDoubles(is, model.normalizer.inv_std.data(), dim, "normalizer scale");
  }
  if (!model.params.AllFinite()) throw FormatError("checkpoint holds non-finite values");
  return model;
}

SwitchModel LoadCheckpoint(const std::string &path, const std::optional<Architecture> &expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open checkpoint '" + path + "'");
  return LoadCheckpoint(is, expected);
}

}  // namespace switchasr
