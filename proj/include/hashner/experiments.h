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

#ifndef HASHNER_EXPERIMENTS_H_
#define HASHNER_EXPERIMENTS_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hashner/data.h"
#include "hashner/model.h"
#include "hashner/train.h"

namespace hashner {

struct ExperimentData {
  Corpus train;
  Corpus dev;
  Corpus eval;  // scored with the seen/unseen breakdown
};

struct Variant {
  std::string name;
  ModelConfig model;
};

struct VariantResult {
  std::string name;
  MultiSeedResult result;
};

// Trains and evaluates every variant once per seed. The training seed is
// set per run; other TrainConfig fields are shared.
std::vector<VariantResult> run_variants(
    std::span<const Variant> variants, const ExperimentData& data, const TrainConfig& train,
    std::span<const uint64_t> seeds,
    std::shared_ptr<const StaticVectorTable> vectors = nullptr, std::ostream* log = nullptr);

// {NORM, PREFIX, SUFFIX, SHAPE} with SHAPE, SUFFIX and PREFIX removed in
// turn, followed by ORTH alone.
std::vector<Variant> ablation_variants(const ModelConfig& base);
// Hash strategy with k = 1..4.
std::vector<Variant> hash_count_variants(const ModelConfig& base);
// Hash tables sized to fractions of the lookup vocabularies built from
// `train` (min_frequency from `base`).
std::vector<Variant> row_fraction_variants(const ModelConfig& base, const Corpus& train,
                                           std::span<const double> fractions);
// Hash defaults, lookup, and hash with rows equal to the lookup tables.
std::vector<Variant> embed_comparison_variants(const ModelConfig& base, const Corpus& train);

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;

  std::string to_markdown() const;
  nlohmann::json to_json() const;
};

// Mean, stddev, seen and unseen F1 (in percent) per variant.
Table results_table(std::span<const VariantResult> results);

// Relative error increase against results[baseline] for overall, seen and
// unseen F1: (err - err_base) / err_base with err = 1 - F1, in percent.
Table relative_error_table(std::span<const VariantResult> results, size_t baseline = 0);

// Formats the relative error increase; "inf" when only the baseline is
// error-free, "0.0%" when both are.
std::string relative_error_increase(double f1, double base_f1);

}  // namespace hashner

#endif  // HASHNER_EXPERIMENTS_H_
