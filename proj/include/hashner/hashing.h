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

#ifndef HASHNER_HASHING_H_
#define HASHNER_HASHING_H_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hashner {

// MurmurHash3 x64 128-bit. Returns {h1, h2}; h1 is the "low" word.
std::array<uint64_t, 2> murmurhash3_x64_128(std::string_view key, uint32_t seed);

// Low 64 bits of MurmurHash3_x64_128 over the UTF-8 bytes of `symbol`.
inline uint64_t seeded_hash(std::string_view symbol, uint32_t seed) {
  return murmurhash3_x64_128(symbol, seed)[0];
}

// A family of k seeded hash functions modded into `rows` buckets.
class HashSpec {
 public:
  static constexpr int kMaxHashes = 4;

  // Default: k = 4, seeds {0,1,2,3}.
  explicit HashSpec(uint64_t rows, int k = kMaxHashes);
  HashSpec(uint64_t rows, std::vector<uint32_t> seeds);

  int k() const { return static_cast<int>(seeds_.size()); }
  uint64_t rows() const { return rows_; }
  const std::vector<uint32_t>& seeds() const { return seeds_; }

 private:
  uint64_t rows_;
  std::vector<uint32_t> seeds_;
};

// index_i = seeded_hash(symbol, seeds[i]) % rows.
std::vector<uint64_t> bucket_indices(std::string_view symbol,
                                     const HashSpec& spec);

// Allocation-free variant; `out` must hold spec.k() entries.
void bucket_indices(std::string_view symbol, const HashSpec& spec,
                    uint64_t* out);

}  // namespace hashner

#endif  // HASHNER_HASHING_H_
