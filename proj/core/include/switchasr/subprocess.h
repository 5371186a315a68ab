// core/include/switchasr/subprocess.h

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

#ifndef SWITCHASR_SUBPROCESS_H_
#define SWITCHASR_SUBPROCESS_H_

#include <chrono>
#include <string>

namespace switchasr {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed or signalled
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
};

/// Runs `command` through /bin/sh -c in its own process group with stdin
/// closed. On timeout the whole group is killed.
ProcessResult RunShell(const std::string &command, std::chrono::milliseconds timeout);

/// Single-quotes `s` for /bin/sh.
std::string ShellQuote(const std::string &s);

}  // namespace switchasr

#endif  // SWITCHASR_SUBPROCESS_H_
