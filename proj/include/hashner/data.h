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

#ifndef HASHNER_DATA_H_
#define HASHNER_DATA_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hashner/embed.h"
#include "hashner/transition.h"

namespace hashner {

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<EntitySpan> entities;  // sorted by start

  int length() const { return static_cast<int>(tokens.size()); }
  // Token text of a span joined with single spaces.
  std::string text(const EntitySpan& span) const;
  // Throws ValidationError on out-of-range or overlapping entities.
  void validate() const;

  bool operator==(const Document&) const = default;
};

using Corpus = std::vector<Document>;

enum class TagScheme { kAuto, kIob1, kIob2, kBiluo };

std::string_view scheme_name(TagScheme s);
std::optional<TagScheme> parse_scheme(std::string_view name);

// A defect found while reading leniently.
struct Problem {
  std::string document;
  int line = 0;  // 0 when not tied to a line
  std::string message;
};

// Decodes one sentence of tags. `lines` (optional, same size as tags) gives
// source line numbers for error messages.
std::vector<EntitySpan> decode_tags(std::span<const std::string> tags, TagScheme scheme,
                                    std::span<const int> lines = {});

// Scheme used by a set of sentences: BILUO when any L-/U- tag occurs, IOB1
// when an I- tag starts an entity, IOB2 otherwise.
TagScheme detect_scheme(std::span<const std::vector<std::string>> sentences);

// CoNLL column format: token first, tag last, blank lines between
// sentences. "-DOCSTART-" lines begin documents; without them every
// sentence is a document. With `problems` set, malformed sentences are
// recorded and skipped instead of raising ParseError.
Corpus read_conll(std::istream& in, const std::string& source,
                  TagScheme scheme = TagScheme::kAuto,
                  std::vector<Problem>* problems = nullptr);
Corpus read_conll(const std::string& path, TagScheme scheme = TagScheme::kAuto,
                  std::vector<Problem>* problems = nullptr);

// Writes BILUO tags, one -DOCSTART- block per document.
void write_conll(std::ostream& out, const Corpus& corpus);
void write_conll(const std::string& path, const Corpus& corpus);

// One object per line: {"id": ..., "tokens": [...], "entities": [[s, e, "L"], ...]}.
Corpus read_jsonl(std::istream& in, const std::string& source,
                  std::vector<Problem>* problems = nullptr);
Corpus read_jsonl(const std::string& path, std::vector<Problem>* problems = nullptr);
void write_jsonl(std::ostream& out, const Corpus& corpus);
void write_jsonl(const std::string& path, const Corpus& corpus);

// Dispatches on extension: .jsonl / .json are JSON lines, anything else CoNLL.
Corpus read_corpus(const std::string& path, TagScheme scheme = TagScheme::kAuto,
                   std::vector<Problem>* problems = nullptr);
void write_corpus(const std::string& path, const Corpus& corpus);

struct Split {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Document-level shuffle then cut at rounded cumulative fractions.
Split random_split(const Corpus& corpus, std::array<double, 3> fractions, uint64_t seed);

// Entity texts (label ignored) of a training corpus.
std::unordered_set<std::string> entity_texts(const Corpus& corpus);

// For each document and entity of `eval`, whether its text occurs verbatim
// as a training entity.
std::vector<std::vector<bool>> unseen_partition(const Corpus& train, const Corpus& eval);

struct DatasetStats {
  size_t documents = 0;
  size_t tokens = 0;
  size_t entities = 0;
  double entities_per_document = 0.0;
  double document_length = 0.0;
  double entity_length = 0.0;
  size_t vocabulary = 0;  // distinct ORTH forms
  std::optional<size_t> unknown_to_static;
  std::map<std::string, size_t> label_counts;
};

DatasetStats dataset_stats(const Corpus& corpus, const StaticVectorTable* vectors = nullptr);

// Distinct NORM, PREFIX, SUFFIX and SHAPE values over all tokens.
std::map<Feature, size_t> feature_count_report(const Corpus& corpus);

// Sorted distinct labels.
std::vector<std::string> corpus_labels(const Corpus& corpus);

}  // namespace hashner

#endif  // HASHNER_DATA_H_
