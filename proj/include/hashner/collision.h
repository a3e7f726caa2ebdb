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

#ifndef HASHNER_COLLISION_H_
#define HASHNER_COLLISION_H_

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

namespace hashner {

// 1 - (1 - 1/n)^(vocab - 1): the chance that a given symbol shares its row
// with at least one other symbol under one uniform hash.
double collision_probability(uint64_t n, uint64_t vocab_size);

// collision_probability(n, vocab) * vocab.
double expected_collisions(uint64_t n, uint64_t vocab_size);

// 1 - (1 - 1/n^k)^(vocab - 1), treating the k-tuple of rows as one hash
// with n^k buckets. Evaluated with log1p/expm1 so n^k never materializes.
double signature_collision_probability(uint64_t n, int k, uint64_t vocab_size);

struct SimulationResult {
  int trials = 0;
  double fraction = 0.0;  // mean over trials
  double stderr_ = 0.0;   // of the mean; 0 for a single trial

  nlohmann::json to_json() const;
};

// Hashes `vocab_size` random distinct strings with seeds 0..k-1 into n rows
// and counts the symbols whose ordered k-signature is shared with another
// symbol. Trial t draws its strings from Rng(seed).split(t).
SimulationResult simulate_collisions(uint64_t n, int k, uint64_t vocab_size, int trials,
                                     uint64_t seed = 0);

struct CollisionReport {
  uint64_t n = 5000;
  int k = 4;
  uint64_t vocab_size = 50000;
  double collision_probability = 0.0;
  double expected_collisions = 0.0;
  double signature_collision_probability = 0.0;
  std::optional<SimulationResult> simulation;

  // Figures quoted in the literature for n=5000, k=4, |vocab|=50000. They
  // are echoed next to the formula values, not recomputed.
  static constexpr double kPublishedCollisionProbability = 0.99995;
  static constexpr double kPublishedExpectedCollisions = 49663;
  static constexpr double kPublishedSignatureProbability = 5e-12;

  nlohmann::json to_json() const;
};

// Throws ValidationError unless n, k, vocab_size >= 1 and trials >= 0.
// trials == 0 gives an analytic-only report.
CollisionReport collision_report(uint64_t n, int k, uint64_t vocab_size, int trials,
                                 uint64_t seed = 0);

}  // namespace hashner

#endif  // HASHNER_COLLISION_H_
