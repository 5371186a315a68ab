// core/include/switchasr/decision.h

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

#ifndef SWITCHASR_DECISION_H_
#define SWITCHASR_DECISION_H_

#include <optional>
#include <string_view>

namespace switchasr {

/// Switch-model output: p0 = P(mixture better), p1 = P(enhanced better).
struct Posterior {
  double p0 = 0.5;
  double p1 = 0.5;
};

enum class Choice { kUseObserved, kUseEnhanced };

std::string_view ChoiceName(Choice c);

struct Decision {
  Choice choice = Choice::kUseEnhanced;
  std::optional<Posterior> posterior;

  bool UsesObserved() const { return choice == Choice::kUseObserved; }
};

}  // namespace switchasr

#endif  // SWITCHASR_DECISION_H_
