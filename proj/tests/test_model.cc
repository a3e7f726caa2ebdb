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

#include "hashner/model.h"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "hashner/errors.h"
#include "hashner/grad_check.h"

using namespace hashner;
using Md = Matrix<double>;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.embed.width = 6;
  c.embed.rows = {{Feature::kNorm, 11}, {Feature::kPrefix, 7}, {Feature::kSuffix, 7},
                  {Feature::kShape, 5}};
  c.encoder.width = 6;
  c.encoder.depth = 2;
  c.ner.labels = {"LOC", "PER"};
  c.ner.hidden_width = 5;
  return c;
}

}  // namespace

TEST_CASE("model config defaults") {
  ModelConfig c;
  CHECK(c.ner.state_tokens == 6);
  CHECK(c.ner.hidden_width == 64);
  CHECK(c.ner.maxout_pieces == 2);
  CHECK(c.encoder.depth == 8);
  CHECK(c.encoder.window == 3);
  c.ner.labels = {"PER"};
  CHECK_NOTHROW(c.validate());
  c.encoder.width = 64;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("precomputed state scores equal the unbatched path") {
  StateScorer<double> scorer(4, 6, 5, 2, 9);
  Rng rng(1);
  scorer.init(rng);
  for (Index i = 0; i < scorer.state_layer().bias().size(); ++i) {
    scorer.state_layer().bias().value(0, i) = rng.uniform(-0.3, 0.3);
  }
  Md tokens(7, 4);
  for (Index i = 0; i < tokens.size(); ++i) tokens.data()[i] = rng.uniform(-1, 1);
  const Md pre = scorer.precompute(tokens);
  const std::vector<int> slots = {3, 0, 2, 1, -1, 1, 6, -1, -1, -1, -1, -1};
  const Md z = scorer.state_preactivation(pre, slots);
  const Md logits = scorer.logits(z, nullptr, nullptr);
  const std::vector<uint8_t> mask = {1, 0, 1, 1, 0, 1, 1, 0, 1};
  for (int s = 0; s < 2; ++s) {
    Md slot_vectors = Md::Zero(6, 4);
    for (int k = 0; k < 6; ++k) {
      if (slots[s * 6 + k] >= 0) slot_vectors.row(k) = tokens.row(slots[s * 6 + k]);
    }
    const auto direct = scorer.score_actions(slot_vectors, mask);
    const auto batched = masked_softmax<double>(logits.row(s), mask);
    CHECK((direct - batched).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(direct(1) == 0.0);
  }
}

TEST_CASE("full model gradients along a gold path") {
  NerModel<double> model(small_config());
  model.init(3);
  Batch batch;
  const std::vector<std::string> a = {"Anna", "met", "Bob", "Smith", "in", "Rome"};
  const std::vector<std::string> b = {"London", "calls"};
  batch.add(model.embed().prepare_tokens(a), {{0, 1, 1}, {2, 4, 1}, {5, 6, 0}});
  batch.add(model.embed().prepare_tokens(b), {{0, 1, 0}});
  const auto& actions = model.actions();
  // Gold action sequence for each document, as (document, slots, target).
  std::vector<int> slot_tokens;
  std::vector<int> targets;
  std::vector<std::vector<uint8_t>> masks;
  for (int d = 0; d < batch.documents(); ++d) {
    TransitionState s(batch.length(d));
    const GoldIndex gold(batch.length(d), batch.gold[d]);
    while (!s.is_terminal()) {
      auto slots = state_feature_tokens(s);
      for (int& t : slots) {
        if (t >= 0) t += batch.offsets[d];
      }
      slot_tokens.insert(slot_tokens.end(), slots.begin(), slots.end());
      const auto costs = oracle_costs(s, gold, actions);
      int target = 0;
      while (costs[target] != 0) ++target;
      targets.push_back(target);
      masks.push_back(valid_actions(s, actions));
      s.apply(actions.decode(target));
    }
  }
  auto params = model.parameters();
  auto loss = [&](bool backward) {
    ForwardCache<double> cache;
    model.encode(batch, cache);
    const Md z = model.scorer().state_preactivation(cache.precomputed, slot_tokens);
    Md hidden;
    MaxoutCache mc;
    const Md logits = model.scorer().logits(z, &hidden, &mc);
    double total = 0.0;
    Md dlogits = Md::Zero(logits.rows(), logits.cols());
    for (Index i = 0; i < logits.rows(); ++i) {
      const auto p = masked_softmax<double>(logits.row(i), masks[i]);
      total -= std::log(p(targets[i]));
      dlogits.row(i) = p;
      dlogits(i, targets[i]) -= 1.0;
    }
    if (backward) {
      model.zero_grad();
      Md dpre = Md::Zero(cache.precomputed.rows(), cache.precomputed.cols());
      model.scorer().backward_states(hidden, dlogits, mc, slot_tokens, dpre);
      model.backward_encode(batch, dpre, cache);
    }
    return total;
  };
  GradCheckOptions options;
  options.max_coordinates = 20;
  const auto report = grad_check(loss, params, 1e-4, options);
  for (const auto& b : report.blocks) {
    INFO(b.name << " " << b.max_relative_error);
    CHECK(b.max_relative_error < 1e-4);
  }
  CHECK(report.passed);
}

TEST_CASE("greedy decode follows the scorer") {
  NerModel<float> model(small_config());
  model.init(4);
  // A large bias on Out makes every prediction empty.
  const int out = model.actions().encode({ActionKind::kOut, -1});
  model.scorer().output_layer().bias().value(0, out) = 1e4f;
  const std::vector<std::string> tokens = {"Anna", "met", "Bob"};
  CHECK(model.decode_tokens(tokens).empty());
  // Unit-PER everywhere.
  model.scorer().output_layer().bias().value(0, out) = 0.0f;
  const int unit = model.actions().encode({ActionKind::kUnit, 1});
  model.scorer().output_layer().bias().value(0, unit) = 1e4f;
  const auto spans = model.decode_tokens(tokens);
  REQUIRE(spans.size() == 3);
  CHECK(spans[1] == EntitySpan{1, 2, "PER"});
}

TEST_CASE("batched decode equals per-document decode") {
  NerModel<float> model(small_config());
  model.init(5);
  // Push toward entity actions so decode takes nontrivial paths.
  model.scorer().output_layer().bias().value(0, 8) = -1.0f;
  const std::vector<std::vector<std::string>> docs = {
      {"Anna", "met", "Bob", "Smith"}, {"x"}, {}, {"Rome", "is", "in", "Italy", "."}};
  Batch batch;
  for (const auto& d : docs) batch.add(model.embed().prepare_tokens(d));
  const auto together = model.decode(batch);
  REQUIRE(together.size() == docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    Batch one;
    one.add(model.embed().prepare_tokens(docs[i]));
    CHECK(model.decode(one)[0] == together[i]);
  }
}

TEST_CASE("parameter names") {
  NerModel<float> model(small_config());
  std::vector<std::string> names;
  for (auto* p : model.parameters()) names.push_back(p->name);
  CHECK(names.front() == "embed.table.NORM");
  CHECK(std::find(names.begin(), names.end(), "encoder.1.norm.gain") != names.end());
  CHECK(std::find(names.begin(), names.end(), "ner.state.W") != names.end());
  CHECK(names.back() == "ner.output.b");
}
