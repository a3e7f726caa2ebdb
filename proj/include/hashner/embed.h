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

#ifndef HASHNER_EMBED_H_
#define HASHNER_EMBED_H_

// Multi-feature token embeddings.
//
// Each enabled orthographic feature owns a table. With the hash strategy a
// feature string is hashed k times into an n-row table and the k rows are
// summed (MultiHashEmbed). With the lookup strategy it is mapped through a
// frequency-filtered vocabulary, unknown strings sharing row 0
// (MultiEmbed). Per-token feature vectors are concatenated in ORTH, NORM,
// PREFIX, SUFFIX, SHAPE order, optionally followed by a static vector for the
// ORTH form, and projected to the model width by a maxout layer.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashner/features.h"
#include "hashner/hashing.h"
#include "hashner/nn.h"

namespace hashner {

enum class EmbedStrategy { kHash, kLookup };

std::string_view strategy_name(EmbedStrategy s);

struct MultiEmbedConfig {
  EmbedStrategy strategy = EmbedStrategy::kHash;
  std::vector<Feature> features = {Feature::kNorm, Feature::kPrefix,
                                   Feature::kSuffix, Feature::kShape};
  int width = 96;
  // Hash strategy: rows per feature. Missing entries use default_rows().
  std::map<Feature, uint64_t> rows;
  int hash_count = 4;
  // Lookup strategy: inclusive minimum frequency.
  int min_frequency = 10;
  int maxout_pieces = 3;
  bool include_static_vectors = false;
  std::string static_vectors_path;

  // NORM 5000, PREFIX/SUFFIX/SHAPE 2500, ORTH 5000.
  static uint64_t default_rows(Feature f);
  uint64_t rows_for(Feature f) const;
  // Enabled features in concatenation order.
  std::vector<Feature> ordered_features() const;
  void validate() const;
  bool operator==(const MultiEmbedConfig&) const = default;
};

// Dense symbol -> row mapping. Row 0 is UNK; symbols occupy 1..size().
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> symbols);

  uint32_t lookup(std::string_view symbol) const;  // 0 when unknown
  size_t size() const { return symbols_.size(); }
  size_t rows() const { return symbols_.size() + 1; }
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, uint32_t> index_;
};

// Keeps strings with count >= min_freq; ids follow descending frequency,
// ties broken lexicographically.
Vocabulary build_vocab(std::span<const std::string> stream, int min_freq);

class StaticVectorTable {
 public:
  StaticVectorTable() = default;
  explicit StaticVectorTable(int width) : width_(width) {}

  int width() const { return width_; }
  size_t size() const { return vectors_.size(); }
  bool contains(const std::string& word) const { return vectors_.count(word) > 0; }
  void set(const std::string& word, std::vector<float> vector);
  // Zero vector on a miss.
  std::vector<float> lookup(const std::string& word) const;
  const float* find(const std::string& word) const;

 private:
  int width_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// word2vec text format: "count dim" header, then "word v1 ... v_dim".
StaticVectorTable load_static_vectors(const std::string& path);

// Row selection for one feature table.
class RowIndexer {
 public:
  virtual ~RowIndexer() = default;
  virtual int rows_per_symbol() const = 0;
  virtual uint64_t table_rows() const = 0;
  virtual void rows(std::string_view symbol, uint32_t* out) const = 0;
};

class HashIndexer final : public RowIndexer {
 public:
  explicit HashIndexer(HashSpec spec) : spec_(std::move(spec)) {}
  int rows_per_symbol() const override { return spec_.k(); }
  uint64_t table_rows() const override { return spec_.rows(); }
  void rows(std::string_view symbol, uint32_t* out) const override;
  const HashSpec& spec() const { return spec_; }

 private:
  HashSpec spec_;
};

class VocabIndexer final : public RowIndexer {
 public:
  explicit VocabIndexer(Vocabulary vocab) : vocab_(std::move(vocab)) {}
  int rows_per_symbol() const override { return 1; }
  uint64_t table_rows() const override { return vocab_.rows(); }
  void rows(std::string_view symbol, uint32_t* out) const override {
    out[0] = vocab_.lookup(symbol);
  }
  const Vocabulary& vocab() const { return vocab_; }

 private:
  Vocabulary vocab_;
};

// n x d table addressed by a RowIndexer; a symbol embeds as the sum of its
// rows and the backward pass adds the upstream gradient to each of them.
template <typename T>
class EmbeddingTable {
 public:
  EmbeddingTable(const std::string& name, std::shared_ptr<const RowIndexer> indexer,
                 int width)
      : indexer_(std::move(indexer)),
        weights_(name, static_cast<Index>(indexer_->table_rows()), width) {}

  void init(Rng& rng) { init_uniform(weights_, -0.1, 0.1, rng); }

  int width() const { return static_cast<int>(weights_.cols()); }
  const RowIndexer& indexer() const { return *indexer_; }
  std::shared_ptr<const RowIndexer> shared_indexer() const { return indexer_; }
  Tensor2D<T>& weights() { return weights_; }
  const Tensor2D<T>& weights() const { return weights_; }

  RowVector<T> lookup(std::string_view symbol) const {
    std::vector<uint32_t> rows(indexer_->rows_per_symbol());
    indexer_->rows(symbol, rows.data());
    RowVector<T> out = RowVector<T>::Zero(width());
    for (uint32_t r : rows) out += weights_.value.row(r);
    return out;
  }

 private:
  std::shared_ptr<const RowIndexer> indexer_;
  Tensor2D<T> weights_;
};

// Table with the hash strategy (MultiHashEmbed feature table).
template <typename T>
EmbeddingTable<T> make_hash_table(const std::string& name, const HashSpec& spec,
                                  int width) {
  return EmbeddingTable<T>(name, std::make_shared<HashIndexer>(spec), width);
}

// Table with the lookup strategy (MultiEmbed feature table).
template <typename T>
EmbeddingTable<T> make_lookup_table(const std::string& name, Vocabulary vocab,
                                    int width) {
  return EmbeddingTable<T>(name, std::make_shared<VocabIndexer>(std::move(vocab)),
                           width);
}

// Pre-resolved rows for a run of tokens: for feature f, rows[f] holds
// rows_per_symbol entries per token. Static vectors are copied in.
struct EmbedInput {
  int tokens = 0;
  std::vector<std::vector<uint32_t>> rows;
  Matrix<float> static_vectors;  // tokens x d_s, empty when disabled

  void append(const EmbedInput& other);
};

template <typename T>
struct MultiEmbedCache {
  Matrix<T> concatenated;
  MaxoutCache maxout;
};

template <typename T>
class MultiEmbed {
 public:
  // `vocabularies` is required for the lookup strategy (one per enabled
  // feature, in concatenation order); `static_vectors` when enabled.
  MultiEmbed(const MultiEmbedConfig& config,
             std::vector<Vocabulary> vocabularies = {},
             std::shared_ptr<const StaticVectorTable> static_vectors = nullptr);

  void init(Rng& rng);

  const MultiEmbedConfig& config() const { return config_; }
  int width() const { return config_.width; }
  int input_width() const;
  const std::vector<Feature>& features() const { return features_; }
  std::vector<EmbeddingTable<T>>& tables() { return tables_; }
  const std::vector<EmbeddingTable<T>>& tables() const { return tables_; }
  Maxout<T>& projection() { return projection_; }
  const Maxout<T>& projection() const { return projection_; }
  const std::shared_ptr<const StaticVectorTable>& static_vectors() const {
    return static_;
  }

  EmbedInput prepare(std::span<const LexicalFeatures> tokens) const;
  EmbedInput prepare_tokens(std::span<const std::string> tokens,
                            const Substitutions& subs = {}) const;

  // Concatenated per-feature embeddings (tokens x input_width()).
  Matrix<T> concatenate(const EmbedInput& input) const;
  Matrix<T> forward(const EmbedInput& input, MultiEmbedCache<T>* cache) const;
  void backward(const EmbedInput& input, const Matrix<T>& dy,
                MultiEmbedCache<T>& cache);

  void collect(ParamList<T>& out);

 private:
  MultiEmbedConfig config_;
  std::vector<Feature> features_;
  std::vector<EmbeddingTable<T>> tables_;
  std::shared_ptr<const StaticVectorTable> static_;
  Maxout<T> projection_;
};

// Lookup-strategy vocabularies for each enabled feature.
std::vector<Vocabulary> build_feature_vocabs(
    std::span<const std::vector<LexicalFeatures>> documents,
    std::span<const Feature> features, int min_freq);

// Hash rows matched to a fraction of the lookup vocabulary sizes (UNK row
// included), rounded up, at least 1.
std::map<Feature, uint64_t> adjusted_rows(std::span<const Vocabulary> vocabs,
                                          std::span<const Feature> features,
                                          double fraction);

}  // namespace hashner

#endif  // HASHNER_EMBED_H_
