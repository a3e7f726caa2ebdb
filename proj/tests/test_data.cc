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

#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hashner/data.h"
#include "hashner/errors.h"
#include "hashner/synthetic.h"

using namespace hashner;

namespace {

Corpus conll(const std::string& text, TagScheme scheme = TagScheme::kAuto) {
  std::istringstream in(text);
  return read_conll(in, "t", scheme);
}

// Independent IOB1 reader: I-X continues a same-label run and otherwise
// opens one; B-X always opens one.
std::vector<EntitySpan> iob1_spans(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> out;
  std::string open;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    const std::string& t = tags[i];
    if (t == "O") {
      open.clear();
      continue;
    }
    const std::string label = t.substr(2);
    if (t[0] == 'I' && open == label) {
      out.back().end = i + 1;
    } else {
      out.push_back(EntitySpan{i, i + 1, label});
      open = label;
    }
  }
  return out;
}

Document doc(std::vector<std::string> tokens, std::vector<EntitySpan> entities = {}) {
  Document d;
  d.id = "d";
  d.tokens = std::move(tokens);
  d.entities = std::move(entities);
  return d;
}

}  // namespace

TEST_CASE("read_conll: single entity") {
  const auto c = conll("John B-PER\nruns O\n\n");
  REQUIRE(c.size() == 1);
  CHECK(c[0].tokens == std::vector<std::string>{"John", "runs"});
  REQUIRE(c[0].entities.size() == 1);
  CHECK(c[0].entities[0] == EntitySpan{0, 1, "PER"});
}

TEST_CASE("read_conll: IOB1 with sentence-initial I-") {
  const std::vector<std::string> tokens = {"Jan", "Smit", "en", "Piet", "B", "uit", "Gent"};
  const std::vector<std::string> tags = {"I-PER", "I-PER", "O",    "I-PER",
                                         "B-PER", "O",     "I-LOC"};
  std::string text;
  for (size_t i = 0; i < tokens.size(); ++i) text += tokens[i] + " X " + tags[i] + "\n";
  const auto c = conll(text);
  REQUIRE(c.size() == 1);
  CHECK(c[0].entities == iob1_spans(tags));
  CHECK(c[0].entities.size() == 4);
  CHECK(detect_scheme(std::vector<std::vector<std::string>>{tags}) == TagScheme::kIob1);
}

TEST_CASE("read_conll: malformed input names the line") {
  try {
    conll("John B-PER\nruns\n\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(conll("a B-PER\nb L-LOC\n\n", TagScheme::kBiluo), ParseError);
  CHECK(conll("").empty());

  std::vector<Problem> problems;
  std::istringstream in("x O\ny\n\nJohn U-PER\n\n");
  const auto c = read_conll(in, "t", TagScheme::kAuto, &problems);
  CHECK(c.size() == 1);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].line == 2);
}

TEST_CASE("read_conll: document boundaries") {
  const auto c = conll(
      "-DOCSTART- O\n\nA B-LOC\nb O\n\nc O\n\n-DOCSTART- O\n\nd O\nE B-PER\n\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].tokens.size() == 3);
  CHECK(c[1].entities == std::vector<EntitySpan>{{1, 2, "PER"}});
}

TEST_CASE("conll and jsonl round trips") {
  SyntheticConfig sc;
  sc.sentences = 50;
  sc.seed = 4;
  const Corpus corpus = generate_synthetic(sc);
  std::stringstream conll_buf;
  write_conll(conll_buf, corpus);
  const Corpus back = read_conll(conll_buf, "synthetic");
  REQUIRE(back.size() == corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back[i].tokens == corpus[i].tokens);
    CHECK(back[i].entities == corpus[i].entities);
  }

  std::stringstream json_buf;
  write_jsonl(json_buf, corpus);
  CHECK(read_jsonl(json_buf, "x") == corpus);
}

TEST_CASE("read_jsonl validation") {
  std::istringstream overlap(
      R"({"id":"a","tokens":["x","y","z"],"entities":[[0,2,"P"],[1,3,"P"]]})"
      "\n");
  CHECK_THROWS_AS(read_jsonl(overlap, "s"), ValidationError);

  std::istringstream mixed(
      R"({"id":"a","tokens":["x","y"],"entities":[[0,3,"P"]]})"
      "\n"
      R"({"id":"b","tokens":["x"],"entities":[[0,1,"P"]]})"
      "\n");
  std::vector<Problem> problems;
  const auto c = read_jsonl(mixed, "s", &problems);
  // Lenient reading keeps the document and drops the bad span.
  REQUIRE(c.size() == 2);
  CHECK(c[0].entities.empty());
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].document == "a");
}

TEST_CASE("random_split") {
  Corpus ten;
  for (int i = 0; i < 10; ++i) ten.push_back(doc({"t" + std::to_string(i)}));
  const auto s = random_split(ten, {0.8, 0.1, 0.1}, 3);
  CHECK(s.train.size() == 8);
  CHECK(s.dev.size() == 1);
  CHECK(s.test.size() == 1);

  std::set<std::string> all;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& d : *part) all.insert(d.tokens[0]);
  }
  CHECK(all.size() == 10);

  const auto again = random_split(ten, {0.8, 0.1, 0.1}, 3);
  CHECK(again.train == s.train);
  CHECK(again.dev == s.dev);

  Corpus hundred;
  for (int i = 0; i < 100; ++i) hundred.push_back(doc({"t" + std::to_string(i)}));
  CHECK(random_split(hundred, {0.8, 0.1, 0.1}, 1).train !=
        random_split(hundred, {0.8, 0.1, 0.1}, 2).train);

  CHECK_THROWS_AS(random_split({}, {0.8, 0.1, 0.1}, 0), ValidationError);
  CHECK_THROWS_AS(random_split(ten, {0.8, 0.1, 0.2}, 0), ValidationError);
}

TEST_CASE("unseen_partition") {
  const Corpus train = {doc({"in", "New", "York"}, {{1, 3, "LOC"}})};
  const Corpus eval = {
      doc({"New", "York", "and", "new", "york"}, {{0, 2, "ORG"}, {3, 5, "LOC"}})};
  const auto flags = unseen_partition(train, eval);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0] == std::vector<bool>{true, false});
  CHECK(unseen_partition({}, eval)[0] == std::vector<bool>{false, false});

  // Adding training entities never turns a seen entity unseen.
  Corpus more = train;
  more.push_back(doc({"new", "york"}, {{0, 2, "LOC"}}));
  CHECK(unseen_partition(more, eval)[0] == std::vector<bool>{true, true});
}

TEST_CASE("dataset_stats") {
  const Corpus c = {doc({"a", "a", "b", "c"}, {{1, 3, "X"}})};
  const auto s = dataset_stats(c);
  CHECK(s.documents == 1);
  CHECK(s.entities_per_document == doctest::Approx(1.0));
  CHECK(s.document_length == doctest::Approx(4.0));
  CHECK(s.entity_length == doctest::Approx(2.0));
  CHECK(s.vocabulary == 3);
  CHECK_FALSE(s.unknown_to_static.has_value());

  CHECK(dataset_stats({doc({"a", "a", "b"})}).vocabulary == 2);

  StaticVectorTable table(2);
  table.set("a", {1.0f, 0.0f});
  const auto with_static = dataset_stats({doc({"a", "a", "b"})}, &table);
  REQUIRE(with_static.unknown_to_static.has_value());
  CHECK(*with_static.unknown_to_static == 1);

  const auto empty = dataset_stats({});
  CHECK(empty.documents == 0);
  CHECK(empty.document_length == 0.0);
}

TEST_CASE("feature_count_report") {
  auto counts = feature_count_report({doc({"Aa", "Ab"})});
  CHECK(counts[Feature::kPrefix] == 1);
  CHECK(counts[Feature::kNorm] == 2);

  counts = feature_count_report({doc({"hello", "HELLO"})});
  CHECK(counts[Feature::kShape] == 2);

  counts = feature_count_report({});
  REQUIRE(counts.size() == 4);
  for (const auto& [f, n] : counts) CHECK(n == 0);
}

TEST_CASE("synthetic corpus") {
  SyntheticConfig sc;
  sc.sentences = 200;
  sc.seed = 9;
  const Corpus a = generate_synthetic(sc);
  CHECK(a == generate_synthetic(sc));
  CHECK(a.size() == 200);
  CHECK(corpus_labels(a) == std::vector<std::string>{"DATE", "PERSON"});
  for (const auto& d : a) {
    CHECK_NOTHROW(d.validate());
    for (const auto& e : d.entities) {
      for (int i = e.start; i < e.end; ++i) {
        const std::string& t = d.tokens[i];
        if (e.label == "DATE") {
          CHECK(shape_of(t) == "dddd");
        } else {
          CHECK(shape_of(t) == "Xxxxx");
        }
      }
    }
  }
}
