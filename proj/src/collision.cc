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

#include "hashner/collision.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "hashner/errors.h"
#include "hashner/hashing.h"
#include "hashner/rng.h"

namespace hashner {

double signature_collision_probability(uint64_t n, int k, uint64_t vocab_size) {
  if (n < 1 || k < 1 || vocab_size < 1) {
    throw ValidationError("signature_collision_probability: n, k and vocab must be >= 1");
  }
  if (vocab_size == 1) return 0.0;
  if (n == 1) return 1.0;
  // log(1 - n^-k) * (vocab - 1)
  const double miss = std::exp(-static_cast<double>(k) * std::log(static_cast<double>(n)));
  const double log_clear = static_cast<double>(vocab_size - 1) * std::log1p(-miss);
  return -std::expm1(log_clear);
}

double collision_probability(uint64_t n, uint64_t vocab_size) {
  return signature_collision_probability(n, 1, vocab_size);
}

double expected_collisions(uint64_t n, uint64_t vocab_size) {
  return collision_probability(n, vocab_size) * static_cast<double>(vocab_size);
}

nlohmann::json SimulationResult::to_json() const {
  return {{"trials", trials},
          {"fraction", fraction},
          {"stderr", stderr_},
          {"ci95", {fraction - 1.96 * stderr_, fraction + 1.96 * stderr_}}};
}

SimulationResult simulate_collisions(uint64_t n, int k, uint64_t vocab_size, int trials,
                                     uint64_t seed) {
  if (n < 1 || k < 1 || k > HashSpec::kMaxHashes || vocab_size < 1) {
    throw ValidationError("simulate_collisions: need n >= 1, 1 <= k <= 4, vocab >= 1");
  }
  if (trials < 1) throw ValidationError("simulate_collisions: trials must be >= 1");
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  const HashSpec spec(n, k);
  const Rng root(seed);
  std::vector<double> fractions;
  fractions.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.split(static_cast<uint64_t>(t));
    std::unordered_set<std::string> seen;
    seen.reserve(vocab_size);
    std::vector<std::array<uint64_t, HashSpec::kMaxHashes>> signatures;
    signatures.reserve(vocab_size);
    std::string s(12, ' ');
    while (signatures.size() < vocab_size) {
      for (char& c : s) c = kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
      if (!seen.insert(s).second) continue;
      std::array<uint64_t, HashSpec::kMaxHashes> sig{};
      bucket_indices(s, spec, sig.data());
      signatures.push_back(sig);
    }
    std::sort(signatures.begin(), signatures.end());
    uint64_t colliding = 0;
    for (size_t i = 0; i < signatures.size();) {
      size_t j = i + 1;
      while (j < signatures.size() && signatures[j] == signatures[i]) ++j;
      if (j - i > 1) colliding += j - i;
      i = j;
    }
    fractions.push_back(static_cast<double>(colliding) / static_cast<double>(vocab_size));
  }
  SimulationResult out;
  out.trials = trials;
  for (double f : fractions) out.fraction += f;
  out.fraction /= trials;
  if (trials > 1) {
    double var = 0.0;
    for (double f : fractions) var += (f - out.fraction) * (f - out.fraction);
    var /= trials - 1;
    out.stderr_ = std::sqrt(var / trials);
  }
  return out;
}

nlohmann::json CollisionReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["k"] = k;
  j["vocab_size"] = vocab_size;
  j["collision_probability"] = collision_probability;
  j["expected_collisions"] = expected_collisions;
  j["signature_collision_probability"] = signature_collision_probability;
  j["published"] = {{"collision_probability", kPublishedCollisionProbability},
                    {"expected_collisions", kPublishedExpectedCollisions},
                    {"signature_collision_probability", kPublishedSignatureProbability}};
  j["simulation"] = simulation ? simulation->to_json() : nlohmann::json(nullptr);
  return j;
}

CollisionReport collision_report(uint64_t n, int k, uint64_t vocab_size, int trials,
                                 uint64_t seed) {
  if (n < 1) throw ValidationError("n: must be >= 1");
  if (k < 1 || k > HashSpec::kMaxHashes) throw ValidationError("k: must be in [1, 4]");
  if (vocab_size < 1) throw ValidationError("vocab: must be >= 1");
  if (trials < 0) throw ValidationError("trials: must be >= 0");
  CollisionReport r;
  r.n = n;
  r.k = k;
  r.vocab_size = vocab_size;
  r.collision_probability = hashner::collision_probability(n, vocab_size);
  r.expected_collisions = hashner::expected_collisions(n, vocab_size);
  r.signature_collision_probability = hashner::signature_collision_probability(n, k, vocab_size);
  if (trials > 0) r.simulation = simulate_collisions(n, k, vocab_size, trials, seed);
  return r;
}

}  // namespace hashner
