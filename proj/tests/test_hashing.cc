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

#include "hashner/hashing.h"

#include <set>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "hashner/rng.h"

using namespace hashner;

// Reference digests from the mmh3 Python package (hash64, low word).
TEST_CASE("murmurhash3 matches reference digests") {
  CHECK(seeded_hash("apple", 0) == 16543525470083357799ULL);
  CHECK(seeded_hash("apple", 1) == 10339275125984602278ULL);
  CHECK(seeded_hash("apple", 2) == 8010222473724887057ULL);
  CHECK(seeded_hash("apple", 3) == 12548470192492453853ULL);
  CHECK(seeded_hash("", 0) == 0ULL);
  CHECK(seeded_hash("", 1) == 5048724184180415669ULL);
  CHECK(seeded_hash("The quick brown fox jumps over the lazy dog", 0) ==
        16378391709484522348ULL);
  CHECK(seeded_hash("\xc3\xa9migr\xc3\xa9", 7) == 12076770401257646652ULL);
}

TEST_CASE("bucket indices use one seed per hash") {
  const auto idx = bucket_indices("apple", HashSpec(5000, 4));
  REQUIRE(idx.size() == 4);
  CHECK(idx[0] == 2799);
  CHECK(idx[1] == 2278);
  CHECK(idx[2] == 2057);
  CHECK(idx[3] == 3853);

  const auto two = bucket_indices("apple", HashSpec(5000, 2));
  CHECK(two == std::vector<uint64_t>{2799, 2278});
}

TEST_CASE("bucket indices are deterministic and in range") {
  Rng rng(3);
  const HashSpec spec(97, 4);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const int len = static_cast<int>(rng.below(12));
    for (int j = 0; j < len; ++j) s.push_back(static_cast<char>(rng.below(256)));
    const auto a = bucket_indices(s, spec);
    const auto b = bucket_indices(s, spec);
    CHECK(a == b);
    for (uint64_t r : a) CHECK(r < 97);
  }
}

TEST_CASE("custom seeds") {
  const HashSpec spec(5000, std::vector<uint32_t>{3, 0});
  CHECK(bucket_indices("apple", spec) == std::vector<uint64_t>{3853, 2799});
}

TEST_CASE("hash spec validation") {
  CHECK_THROWS_AS(HashSpec(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(HashSpec(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(HashSpec(10, 5), std::invalid_argument);
  CHECK_THROWS_AS(HashSpec(10, std::vector<uint32_t>{1, 1}), std::invalid_argument);
  CHECK_NOTHROW(HashSpec(1, 1));
}

TEST_CASE("distinct seeds spread symbols") {
  std::set<uint64_t> rows;
  for (const auto r : bucket_indices("entity", HashSpec(1u << 20, 4))) rows.insert(r);
  CHECK(rows.size() == 4);
}

TEST_CASE("rng streams") {
  Rng a(11), b(11);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  const Rng root(5);
  Rng s1 = root.split(1), s2 = root.split(2), s1b = root.split(1);
  CHECK(s1.next_u64() != s2.next_u64());
  Rng s1c = root.split(1);
  s1b.next_u64();
  CHECK(s1c.next_u64() != s1b.next_u64());
  Rng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    CHECK(u.below(7) < 7);
  }
}
