/* Copyright 2026 The hashner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HASHNER_SYNTHETIC_H_
#define HASHNER_SYNTHETIC_H_

#include <cstdint>

#include "hashner/data.h"

namespace hashner {

// Generated corpus whose entities are recoverable from orthography alone:
// PERSON spans are runs of capitalized words, DATE spans four-digit numbers.
// Lowercase filler carries no signal. Camel-case words ("BaDoxi") and
// three-digit numbers share prefix and suffix classes with the entities and
// differ only in shape; names are drawn fresh so most evaluation entities are
// unseen in training.
struct SyntheticConfig {
  int sentences = 5000;
  int min_filler = 6;
  int max_filler = 16;
  double person_rate = 0.6;
  double date_rate = 0.4;
  double camel_rate = 0.35;
  double number_rate = 0.3;
  double extra_rate = 0.5;  // acronyms, decimals, hyphenated words, punctuation
  uint64_t seed = 0;
};

Corpus generate_synthetic(const SyntheticConfig& config);

}  // namespace hashner

#endif  // HASHNER_SYNTHETIC_H_
