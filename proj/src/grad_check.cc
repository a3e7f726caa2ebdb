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

#include "hashner/grad_check.h"

#include <algorithm>
#include <cmath>

#include "hashner/rng.h"

namespace hashner {

GradCheckReport grad_check(const std::function<double(bool)>& loss,
                           const ParamList<double>& params, double tolerance,
                           const GradCheckOptions& options) {
  loss(true);
  std::vector<Matrix<double>> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) analytic.push_back(p->grad);

  Rng rng(options.seed);
  GradCheckReport report;
  for (size_t b = 0; b < params.size(); ++b) {
    Tensor2D<double>& param = *params[b];
    const Index n = param.size();
    std::vector<Index> nonzero;
    for (Index i = 0; i < n; ++i) {
      if (analytic[b].data()[i] != 0.0) nonzero.push_back(i);
    }
    std::vector<Index> coords;
    const int half = options.max_coordinates / 2;
    if (static_cast<Index>(nonzero.size()) <= half) {
      coords = nonzero;
    } else {
      rng.shuffle(nonzero.begin(), nonzero.end());
      coords.assign(nonzero.begin(), nonzero.begin() + half);
    }
    const Index uniform_draws =
        std::min<Index>(n, options.max_coordinates - static_cast<Index>(coords.size()));
    for (Index i = 0; i < uniform_draws; ++i) {
      coords.push_back(static_cast<Index>(rng.below(static_cast<uint64_t>(n))));
    }
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

    BlockError block{param.name, 0.0, static_cast<int>(coords.size())};
    for (const Index i : coords) {
      double& x = param.value.data()[i];
      const double saved = x;
      x = saved + options.step;
      const double plus = loss(false);
      x = saved - options.step;
      const double minus = loss(false);
      x = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[b].data()[i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.scale_floor});
      const double err = std::abs(a - numeric) / denom;
      if (err >= block.max_relative_error) {
        block.max_relative_error = err;
        block.analytic = a;
        block.numeric = numeric;
      }
    }
    report.max_relative_error =
        std::max(report.max_relative_error, block.max_relative_error);
    report.blocks.push_back(std::move(block));
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace hashner
