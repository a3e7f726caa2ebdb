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

#include <cmath>
#include <tuple>

#include "doctest.h"
#include "hashner/errors.h"

using namespace hashner;

TEST_CASE("single-hash collision probability") {
  CHECK(collision_probability(5000, 50000) == doctest::Approx(0.99995).epsilon(1e-5));
  // Direct evaluation in long double as the oracle.
  const long double direct = 1.0L - std::pow(1.0L - 1.0L / 5000, 49999.0L);
  CHECK(collision_probability(5000, 50000) == doctest::Approx(static_cast<double>(direct)));
  CHECK(collision_probability(5000, 1) == 0.0);
  CHECK(collision_probability(1000000000000ULL, 2) == doctest::Approx(1e-12).epsilon(1e-6));
  CHECK(collision_probability(1, 10) == 1.0);
}

TEST_CASE("expected collisions") {
  CHECK(expected_collisions(5000, 50000) == doctest::Approx(49997.7).epsilon(1e-5));
  CHECK(expected_collisions(5000, 1) == 0.0);
  CHECK(expected_collisions(1, 10) == 10.0);
}

TEST_CASE("signature collision probability") {
  const double p = signature_collision_probability(5000, 4, 50000);
  CHECK(p == doctest::Approx(49999.0 / std::pow(5000.0, 4)).epsilon(1e-6));
  CHECK(p > 7.9e-11);
  CHECK(p < 8.1e-11);
  for (uint64_t n : {1ULL, 7ULL, 5000ULL}) {
    for (uint64_t v : {1ULL, 2ULL, 50000ULL}) {
      CHECK(signature_collision_probability(n, 1, v) == collision_probability(n, v));
    }
  }
  CHECK_THROWS_AS(signature_collision_probability(0, 1, 1), ValidationError);
}

TEST_CASE("simulation agrees with the formula") {
  // At (100, 1000) a trial without a collision-free symbol is the norm, so
  // the standard error needs many trials to be nonzero.
  for (auto [n, v, trials] : {std::tuple<uint64_t, uint64_t, int>{100, 1000, 400},
                              {5000, 50000, 10}}) {
    const auto sim = simulate_collisions(n, 1, v, trials, 3);
    const double p = collision_probability(n, v);
    INFO(n << " " << v << " " << sim.fraction << " +- " << sim.stderr_);
    CHECK(sim.stderr_ > 0.0);
    CHECK(std::abs(sim.fraction - p) <= 3 * sim.stderr_);
  }
  CHECK(simulate_collisions(1, 2, 5, 2).fraction == 1.0);
  CHECK(simulate_collisions(10, 2, 1, 2).fraction == 0.0);
  // Full signatures over 4 hashes into 50 rows rarely collide for 100 symbols.
  CHECK(simulate_collisions(50, 4, 100, 3).fraction < 0.05);
  CHECK_THROWS_AS(simulate_collisions(10, 1, 10, 0), ValidationError);
}

TEST_CASE("collision report") {
  const auto r = collision_report(5000, 4, 50000, 0);
  CHECK_FALSE(r.simulation.has_value());
  const auto j = r.to_json();
  CHECK(j["published"]["expected_collisions"] == 49663);
  CHECK(j["simulation"].is_null());
  CHECK(j["signature_collision_probability"].get<double>() ==
        doctest::Approx(8e-11).epsilon(0.01));
  CHECK_THROWS_AS(collision_report(0, 4, 50000, 0), ValidationError);
  CHECK_THROWS_AS(collision_report(10, 5, 50, 0), ValidationError);
  CHECK(collision_report(100, 1, 1000, 2, 1).simulation->trials == 2);
}
