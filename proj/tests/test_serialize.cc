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

#include "hashner/serialize.h"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hashner/errors.h"
#include "hashner/synthetic.h"
#include "hashner/train.h"

using namespace hashner;
namespace fs = std::filesystem;

namespace {

ModelConfig small_config(EmbedStrategy strategy) {
  ModelConfig c;
  c.embed.strategy = strategy;
  c.embed.width = 8;
  if (strategy == EmbedStrategy::kLookup) {
    c.embed.min_frequency = 2;
  } else {
    c.embed.rows = {{Feature::kNorm, 64}, {Feature::kPrefix, 16}, {Feature::kSuffix, 32},
                    {Feature::kShape, 16}};
  }
  c.encoder.width = 8;
  c.encoder.depth = 2;
  c.ner.hidden_width = 6;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hashner_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("save and load preserve predictions") {
  SyntheticConfig sc;
  sc.sentences = 40;
  sc.seed = 2;
  const Corpus corpus = generate_synthetic(sc);
  const Corpus ten(corpus.begin(), corpus.begin() + 10);
  for (auto strategy : {EmbedStrategy::kHash, EmbedStrategy::kLookup}) {
    auto model = build_model<float>(small_config(strategy), corpus, nullptr, 3);
    // Make predictions non-trivial with a short run.
    TrainConfig tc;
    tc.max_steps = 20;
    tc.eval_frequency = 10;
    tc.patience = 20;
    tc.batch_words = 60;
    train(*model, corpus, ten, tc);

    const fs::path dir = scratch(strategy == EmbedStrategy::kHash ? "hash" : "lookup");
    save_model(dir.string(), *model);
    CHECK(fs::exists(dir / "config.toml"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "params.bin"));
    CHECK(fs::exists(dir / "vocab_NORM.json") == (strategy == EmbedStrategy::kLookup));

    const auto loaded = load_model(dir.string());
    CHECK(loaded.model->config() == model->config());
    auto a = model->parameters();
    auto b = loaded.model->parameters();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);
    CHECK(predict(*loaded.model, ten) == predict(*model, ten));
    fs::remove_all(dir);
  }
}

TEST_CASE("load rejects inconsistent directories") {
  SyntheticConfig sc;
  sc.sentences = 5;
  const Corpus corpus = generate_synthetic(sc);
  auto model = build_model<float>(small_config(EmbedStrategy::kHash), corpus, nullptr, 1);
  const fs::path dir = scratch("corrupt");
  save_model(dir.string(), *model);

  // Truncated blob.
  const auto size = fs::file_size(dir / "params.bin");
  fs::resize_file(dir / "params.bin", size - 4);
  CHECK_THROWS_AS(load_model(dir.string()), ValidationError);
  fs::resize_file(dir / "params.bin", size);
  CHECK_NOTHROW(load_model(dir.string()));

  // Corrupt manifest.
  {
    std::ofstream out(dir / "manifest.json");
    out << "{\"format\": ";
  }
  CHECK_THROWS_AS(load_model(dir.string()), ValidationError);
  CHECK_THROWS_AS(load_model((dir / "missing").string()), IoError);
  fs::remove_all(dir);
}
