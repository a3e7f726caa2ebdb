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

#ifndef HASHNER_SERIALIZE_H_
#define HASHNER_SERIALIZE_H_

#include <memory>
#include <string>

#include "hashner/config.h"
#include "hashner/model.h"

namespace hashner {

// Model directory layout:
//   config.toml     resolved pipeline config (labels filled in)
//   manifest.json   tensor names, shapes and offsets into params.bin
//   params.bin      little-endian float32 values, row-major, manifest order
//   vocab_<F>.json  lookup strategy only: symbols in row order (row 0 is UNK)
// Static vectors are not copied; they are reloaded from
// embed.static_vectors.
template <typename T>
void save_model(const std::string& dir, NerModel<T>& model, PipelineConfig pipeline = {});

struct LoadedModel {
  PipelineConfig config;
  std::unique_ptr<NerModel<float>> model;
};

// Throws ValidationError when the manifest disagrees with the config or
// with the size of params.bin, IoError on missing files.
LoadedModel load_model(const std::string& dir);

}  // namespace hashner

#endif  // HASHNER_SERIALIZE_H_
