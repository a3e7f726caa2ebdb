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

#ifndef HASHNER_CONFIG_H_
#define HASHNER_CONFIG_H_

#include <string>

#include "hashner/model.h"
#include "hashner/train.h"

namespace hashner {

struct PathsConfig {
  std::string train;
  std::string dev;
  std::string test;
  std::string output;

  bool operator==(const PathsConfig&) const = default;
};

// Sections [embed] (with an optional [embed.rows] table), [encoder], [ner],
// [training] and [paths]. Omitted keys keep their defaults; unknown keys,
// type mismatches and invalid values raise ConfigError naming section.key.
//
// Strategy-specific keys: rows and hash_count belong to "hash",
// min_frequency to "lookup". After parsing, hash configs carry resolved
// rows for every enabled feature.
struct PipelineConfig {
  ModelConfig model;
  TrainConfig training;
  PathsConfig paths;

  // Empty ner.labels is allowed here: labels are then read from the corpus.
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

// `base_dir` anchors relative paths in [paths] and embed.static_vectors.
PipelineConfig parse_config_string(const std::string& text, const std::string& base_dir = "");
PipelineConfig parse_config(const std::string& path);

// TOML text that parses back to an identical config.
std::string emit_config(const PipelineConfig& config);
void write_config(const std::string& path, const PipelineConfig& config);

}  // namespace hashner

#endif  // HASHNER_CONFIG_H_
