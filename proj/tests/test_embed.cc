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

#include "hashner/embed.h"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hashner/errors.h"
#include "hashner/grad_check.h"

using namespace hashner;
using Md = Matrix<double>;

TEST_CASE("hash table sums its k rows") {
  Rng rng(1);
  auto table = make_hash_table<double>("t", HashSpec(5000, 4), 8);
  table.init(rng);
  RowVector<double> expected = RowVector<double>::Zero(8);
  for (int r : {2799, 2278, 2057, 3853}) expected += table.weights().value.row(r);
  CHECK((table.lookup("apple") - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding init range") {
  Rng rng(2);
  auto table = make_hash_table<float>("t", HashSpec(100, 2), 16);
  table.init(rng);
  CHECK(table.weights().value.cwiseAbs().maxCoeff() <= 0.1f);
  CHECK(table.weights().value.cwiseAbs().maxCoeff() > 0.09f);
}

TEST_CASE("vocabulary threshold, ordering and UNK") {
  std::vector<std::string> stream;
  for (int i = 0; i < 12; ++i) stream.push_back("the");
  for (int i = 0; i < 10; ++i) stream.push_back("cat");
  for (int i = 0; i < 10; ++i) stream.push_back("bat");
  for (int i = 0; i < 9; ++i) stream.push_back("rare");
  const Vocabulary v = build_vocab(stream, 10);
  CHECK(v.symbols() == std::vector<std::string>{"the", "bat", "cat"});
  CHECK(v.rows() == 4);
  CHECK(v.lookup("the") == 1);
  CHECK(v.lookup("bat") == 2);
  CHECK(v.lookup("rare") == 0);
  CHECK(v.lookup("unseen") == 0);

  auto table = make_lookup_table<double>("t", v, 4);
  CHECK(table.weights().rows() == 4);
  Rng rng(3);
  table.init(rng);
  CHECK(table.lookup("rare") == table.lookup("unseen"));
}

TEST_CASE("adjusted rows follow vocabulary size") {
  const std::vector<Vocabulary> vocabs = {Vocabulary({"a", "b", "c"}), Vocabulary()};
  const std::vector<Feature> features = {Feature::kNorm, Feature::kShape};
  const auto rows = adjusted_rows(vocabs, features, 0.5);
  CHECK(rows.at(Feature::kNorm) == 2);
  CHECK(rows.at(Feature::kShape) == 1);
}

TEST_CASE("config defaults and validation") {
  MultiEmbedConfig c;
  CHECK(c.rows_for(Feature::kNorm) == 5000);
  CHECK(c.rows_for(Feature::kPrefix) == 2500);
  CHECK(c.rows_for(Feature::kSuffix) == 2500);
  CHECK(c.rows_for(Feature::kShape) == 2500);
  CHECK(c.width == 96);
  CHECK(c.hash_count == 4);
  CHECK(c.min_frequency == 10);
  c.features = {Feature::kShape, Feature::kOrth};
  CHECK(c.ordered_features() == std::vector<Feature>{Feature::kOrth, Feature::kShape});
  c.hash_count = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.hash_count = 2;
  c.features = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.features = {Feature::kNorm};
  c.rows[Feature::kNorm] = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("multi embed forward shape and feature order") {
  MultiEmbedConfig c;
  c.width = 8;
  c.features = {Feature::kShape, Feature::kNorm};
  c.rows = {{Feature::kNorm, 50}, {Feature::kShape, 20}};
  MultiEmbed<double> embed(c);
  Rng rng(4);
  embed.init(rng);
  CHECK(embed.features() == std::vector<Feature>{Feature::kNorm, Feature::kShape});
  CHECK(embed.input_width() == 16);
  const std::vector<std::string> tokens = {"Paris", "is", "big"};
  const auto input = embed.prepare_tokens(tokens);
  const Md x = embed.concatenate(input);
  CHECK(x.rows() == 3);
  CHECK((x.row(0).segment(0, 8) - embed.tables()[0].lookup("paris")).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((x.row(0).segment(8, 8) - embed.tables()[1].lookup("Xxxxx")).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(embed.forward(input, nullptr).cols() == 8);
}

TEST_CASE("multi embed gradients reach hashed rows") {
  MultiEmbedConfig c;
  c.width = 6;
  c.rows = {{Feature::kNorm, 7}, {Feature::kPrefix, 5}, {Feature::kSuffix, 5},
            {Feature::kShape, 3}};
  MultiEmbed<double> embed(c);
  Rng rng(5);
  embed.init(rng);
  const std::vector<std::string> tokens = {"Alpha", "beta", "Gamma", "1999", "delta"};
  const auto input = embed.prepare_tokens(tokens);
  Md probe(5, 6);
  for (Index i = 0; i < probe.size(); ++i) probe.data()[i] = rng.uniform(-1, 1);
  ParamList<double> params;
  embed.collect(params);
  auto loss = [&](bool backward) {
    MultiEmbedCache<double> cache;
    const Md y = embed.forward(input, &cache);
    if (backward) {
      for (auto* p : params) p->zero_grad();
      embed.backward(input, probe, cache);
    }
    return (y.array() * probe.array()).sum();
  };
  const auto report = grad_check(loss, params, 1e-4);
  CHECK(report.passed);
}

TEST_CASE("lookup strategy needs vocabularies") {
  MultiEmbedConfig c;
  c.strategy = EmbedStrategy::kLookup;
  CHECK_THROWS_AS(MultiEmbed<float>{c}, ConfigError);
  std::vector<Vocabulary> vocabs(4, Vocabulary({"x"}));
  MultiEmbed<float> embed(c, vocabs);
  CHECK(embed.tables()[0].weights().rows() == 2);
}

TEST_CASE("static vectors: loading and concatenation") {
  const std::string path = "test_vectors.txt";
  {
    std::ofstream out(path);
    out << "2 3\nParis 1 2 3\nis 0.5 0.5 0.5\n";
  }
  auto table = std::make_shared<StaticVectorTable>(load_static_vectors(path));
  CHECK(table->width() == 3);
  CHECK(table->lookup("Paris") == std::vector<float>{1, 2, 3});
  CHECK(table->lookup("nope") == std::vector<float>{0, 0, 0});

  MultiEmbedConfig c;
  c.width = 4;
  c.features = {Feature::kNorm};
  c.include_static_vectors = true;
  c.static_vectors_path = path;
  MultiEmbed<double> embed(c, {}, table);
  Rng rng(6);
  embed.init(rng);
  CHECK(embed.input_width() == 7);
  const std::vector<std::string> tokens = {"Paris", "London"};
  const Md x = embed.concatenate(embed.prepare_tokens(tokens));
  CHECK(x(0, 4) == 1.0);
  CHECK(x(0, 6) == 3.0);
  CHECK(x.row(1).segment(4, 3).isZero());

  {
    std::ofstream out(path);
    out << "2 3\nParis 1 2 3\nis 0.5 oops 0.5\n";
  }
  try {
    load_static_vectors(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << "5 3\nParis 1 2 3\n";
  }
  CHECK_THROWS_AS(load_static_vectors(path), ParseError);
  std::remove(path.c_str());
}
