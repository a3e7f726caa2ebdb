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

#ifndef HASHNER_EVALUATE_H_
#define HASHNER_EVALUATE_H_

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hashner/data.h"

namespace hashner {

struct Prf {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Ratios from the counts. A zero denominator gives 0, except that an
  // empty gold set with no predictions scores 1 throughout.
  void finalize();
  nlohmann::json to_json() const;
};

struct EvalReport {
  size_t documents = 0;
  Prf micro;
  std::map<std::string, Prf> per_label;
  // Present when training entity texts were supplied.
  std::optional<Prf> seen;
  std::optional<Prf> unseen;

  nlohmann::json to_json() const;
};

// Exact span-and-label matching, micro-averaged. With `known` (training
// entity texts), the unseen score drops seen gold entities and predictions
// whose text is known; the seen score keeps exactly those.
EvalReport score_corpus(const Corpus& gold,
                        const std::vector<std::vector<EntitySpan>>& predicted,
                        const std::unordered_set<std::string>* known = nullptr);

}  // namespace hashner

#endif  // HASHNER_EVALUATE_H_
