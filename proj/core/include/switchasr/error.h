// core/include/switchasr/error.h

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

#ifndef SWITCHASR_ERROR_H_
#define SWITCHASR_ERROR_H_

#include <stdexcept>
#include <string>

namespace switchasr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition on an argument failed (empty signal, length mismatch, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A power ratio was requested with a zero or negative term.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

/// Noise power could not be estimated (no mutually inactive frames).
class EstimationUnavailable : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file (WAV, checkpoint, manifest, label file).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint was written for a different network shape.
class ArchitectureMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};

/// External SE/ASR adapter failed. Carries the utterance id.
class AdapterError : public Error {
 public:
  AdapterError(std::string utt_id, const std::string &what)
      : Error("adapter failed for utterance '" + utt_id + "': " + what),
        utt_id_(std::move(utt_id)) {}
  const std::string &utt_id() const { return utt_id_; }

 private:
  std::string utt_id_;
};

/// Missing prerequisites detected before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace switchasr

#endif  // SWITCHASR_ERROR_H_
