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

#ifndef HASHNER_GRAD_CHECK_H_
#define HASHNER_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hashner/nn.h"

namespace hashner {

struct GradCheckOptions {
  double step = 1e-6;
  // Coordinates sampled per parameter block; half are drawn from entries
  // with a nonzero analytic gradient so sparse tables are exercised.
  int max_coordinates = 40;
  // Relative errors use max(|analytic|, |numeric|, scale_floor) as the
  // denominator; below the floor the central difference is noise.
  double scale_floor = 1e-6;
  uint64_t seed = 7;
};

struct BlockError {
  std::string name;
  double max_relative_error = 0.0;
  int coordinates = 0;
  // Gradients at the worst coordinate.
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<BlockError> blocks;
  double max_relative_error = 0.0;
  bool passed = false;
};

// `loss(true)` must zero gradients, run forward + backward and return the
// loss; `loss(false)` must only run forward. The closure has to be
// deterministic (dropout off).
GradCheckReport grad_check(const std::function<double(bool)>& loss,
                           const ParamList<double>& params, double tolerance,
                           const GradCheckOptions& options = {});

}  // namespace hashner

#endif  // HASHNER_GRAD_CHECK_H_
