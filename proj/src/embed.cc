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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hashner/errors.h"

namespace hashner {

std::string_view strategy_name(EmbedStrategy s) {
  return s == EmbedStrategy::kHash ? "hash" : "lookup";
}

// ---------------------------------------------------------------------------
// MultiEmbedConfig

uint64_t MultiEmbedConfig::default_rows(Feature f) {
  switch (f) {
    case Feature::kOrth:
    case Feature::kNorm:
      return 5000;
    case Feature::kPrefix:
    case Feature::kSuffix:
    case Feature::kShape:
      return 2500;
  }
  return 2500;
}

uint64_t MultiEmbedConfig::rows_for(Feature f) const {
  auto it = rows.find(f);
  return it != rows.end() ? it->second : default_rows(f);
}

std::vector<Feature> MultiEmbedConfig::ordered_features() const {
  std::vector<Feature> out;
  for (Feature f : kAllFeatures) {
    if (std::find(features.begin(), features.end(), f) != features.end()) {
      out.push_back(f);
    }
  }
  return out;
}

void MultiEmbedConfig::validate() const {
  if (features.empty()) throw ConfigError("embed.features: at least one feature");
  auto sorted = features;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("embed.features: duplicate feature");
  }
  if (width < 1) throw ConfigError("embed.width: must be > 0");
  if (maxout_pieces < 1) throw ConfigError("embed.maxout_pieces: must be >= 1");
  if (strategy == EmbedStrategy::kHash) {
    if (hash_count < 1 || hash_count > HashSpec::kMaxHashes) {
      throw ConfigError("embed.hash_count: must be in [1, 4]");
    }
    for (const auto& [f, n] : rows) {
      if (n < 1) {
        throw ConfigError("embed.rows." + std::string(feature_name(f)) +
                          ": must be >= 1");
      }
    }
  } else if (min_frequency < 1) {
    throw ConfigError("embed.min_frequency: must be >= 1");
  }
  if (include_static_vectors && static_vectors_path.empty()) {
    throw ConfigError("embed.static_vectors: path required when "
                      "include_static_vectors is true");
  }
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    if (!index_.emplace(symbols_[i], static_cast<uint32_t>(i + 1)).second) {
      throw ValidationError("duplicate vocabulary entry: " + symbols_[i]);
    }
  }
}

uint32_t Vocabulary::lookup(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? 0 : it->second;
}

Vocabulary build_vocab(std::span<const std::string> stream, int min_freq) {
  if (min_freq < 1) throw std::invalid_argument("min_freq must be >= 1");
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& s : stream) ++counts[s];
  std::vector<std::pair<std::string, int64_t>> kept;
  for (auto& [s, c] : counts) {
    if (c >= min_freq) kept.emplace_back(s, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> symbols;
  symbols.reserve(kept.size());
  for (auto& [s, c] : kept) symbols.push_back(std::move(s));
  return Vocabulary(std::move(symbols));
}

std::vector<Vocabulary> build_feature_vocabs(
    std::span<const std::vector<LexicalFeatures>> documents,
    std::span<const Feature> features, int min_freq) {
  std::vector<Vocabulary> out;
  for (Feature f : features) {
    std::vector<std::string> stream;
    for (const auto& doc : documents) {
      for (const auto& lex : doc) stream.push_back(lex.get(f));
    }
    out.push_back(build_vocab(stream, min_freq));
  }
  return out;
}

std::map<Feature, uint64_t> adjusted_rows(std::span<const Vocabulary> vocabs,
                                          std::span<const Feature> features,
                                          double fraction) {
  if (vocabs.size() != features.size()) {
    throw std::invalid_argument("adjusted_rows: one vocabulary per feature");
  }
  if (!(fraction > 0.0)) throw std::invalid_argument("fraction must be > 0");
  std::map<Feature, uint64_t> rows;
  for (size_t i = 0; i < features.size(); ++i) {
    const double n = std::ceil(fraction * static_cast<double>(vocabs[i].rows()));
    rows[features[i]] = std::max<uint64_t>(1, static_cast<uint64_t>(n));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Static vectors

void StaticVectorTable::set(const std::string& word, std::vector<float> vector) {
  if (static_cast<int>(vector.size()) != width_) {
    throw ValidationError("static vector width mismatch for " + word);
  }
  vectors_[word] = std::move(vector);
}

std::vector<float> StaticVectorTable::lookup(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? std::vector<float>(width_, 0.0f) : it->second;
}

const float* StaticVectorTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : it->second.data();
}

namespace {

bool parse_float(std::string_view s, float& out) {
  // std::from_chars for float is available in libstdc++ 11.
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

StaticVectorTable load_static_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open static vectors: " + path);
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header", 1);
  ++line_no;
  const auto header = split_ws(line);
  long long count = -1;
  int dim = -1;
  if (header.size() != 2 ||
      std::from_chars(header[0].data(), header[0].data() + header[0].size(), count).ec !=
          std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), dim).ec !=
          std::errc() ||
      count < 0 || dim < 1) {
    throw ParseError(path + ": header must be \"count dim\"", line_no);
  }
  StaticVectorTable table(dim);
  long long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw ParseError(path + ": expected word and " + std::to_string(dim) +
                           " values, found " + std::to_string(fields.size() - 1),
                       line_no);
    }
    std::vector<float> v(dim);
    for (int i = 0; i < dim; ++i) {
      if (!parse_float(fields[i + 1], v[i])) {
        throw ParseError(path + ": bad number \"" + std::string(fields[i + 1]) + "\"",
                         line_no);
      }
    }
    table.set(std::string(fields[0]), std::move(v));
    ++rows;
  }
  if (rows != count) {
    throw ParseError(path + ": header announces " + std::to_string(count) +
                     " vectors, file has " + std::to_string(rows));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Indexers and inputs

void HashIndexer::rows(std::string_view symbol, uint32_t* out) const {
  uint64_t buckets[HashSpec::kMaxHashes];
  bucket_indices(symbol, spec_, buckets);
  for (int i = 0; i < spec_.k(); ++i) out[i] = static_cast<uint32_t>(buckets[i]);
}

void EmbedInput::append(const EmbedInput& other) {
  if (tokens == 0 && rows.empty()) {
    *this = other;
    return;
  }
  if (rows.size() != other.rows.size()) {
    throw std::invalid_argument("EmbedInput::append: feature count mismatch");
  }
  for (size_t f = 0; f < rows.size(); ++f) {
    rows[f].insert(rows[f].end(), other.rows[f].begin(), other.rows[f].end());
  }
  if (static_vectors.cols() > 0) {
    Matrix<float> merged(static_vectors.rows() + other.static_vectors.rows(),
                         static_vectors.cols());
    merged << static_vectors, other.static_vectors;
    static_vectors = std::move(merged);
  }
  tokens += other.tokens;
}

// ---------------------------------------------------------------------------
// MultiEmbed

template <typename T>
MultiEmbed<T>::MultiEmbed(const MultiEmbedConfig& config,
                          std::vector<Vocabulary> vocabularies,
                          std::shared_ptr<const StaticVectorTable> static_vectors)
    : config_(config),
      features_(config.ordered_features()),
      static_(std::move(static_vectors)) {
  config_.validate();
  if (config_.strategy == EmbedStrategy::kLookup &&
      vocabularies.size() != features_.size()) {
    throw ConfigError("embed: lookup strategy needs one vocabulary per feature");
  }
  if (config_.include_static_vectors && !static_) {
    throw ConfigError("embed: static vectors enabled but no table loaded");
  }
  for (size_t i = 0; i < features_.size(); ++i) {
    const std::string name =
        "embed.table." + std::string(feature_name(features_[i]));
    if (config_.strategy == EmbedStrategy::kHash) {
      tables_.push_back(make_hash_table<T>(
          name, HashSpec(config_.rows_for(features_[i]), config_.hash_count),
          config_.width));
    } else {
      tables_.push_back(
          make_lookup_table<T>(name, std::move(vocabularies[i]), config_.width));
    }
  }
  projection_ = Maxout<T>("embed.maxout", input_width(), config_.width,
                          config_.maxout_pieces);
}

template <typename T>
int MultiEmbed<T>::input_width() const {
  int w = static_cast<int>(features_.size()) * config_.width;
  if (config_.include_static_vectors) w += static_->width();
  return w;
}

template <typename T>
void MultiEmbed<T>::init(Rng& rng) {
  for (auto& t : tables_) t.init(rng);
  projection_.init(rng);
}

template <typename T>
EmbedInput MultiEmbed<T>::prepare(std::span<const LexicalFeatures> tokens) const {
  EmbedInput input;
  input.tokens = static_cast<int>(tokens.size());
  input.rows.resize(features_.size());
  for (size_t f = 0; f < features_.size(); ++f) {
    const RowIndexer& indexer = tables_[f].indexer();
    const int k = indexer.rows_per_symbol();
    auto& rows = input.rows[f];
    rows.resize(tokens.size() * k);
    for (size_t t = 0; t < tokens.size(); ++t) {
      indexer.rows(tokens[t].get(features_[f]), rows.data() + t * k);
    }
  }
  if (config_.include_static_vectors) {
    input.static_vectors = Matrix<float>::Zero(input.tokens, static_->width());
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (const float* v = static_->find(tokens[t].orth)) {
        for (int c = 0; c < static_->width(); ++c) input.static_vectors(t, c) = v[c];
      }
    }
  }
  return input;
}

template <typename T>
EmbedInput MultiEmbed<T>::prepare_tokens(std::span<const std::string> tokens,
                                         const Substitutions& subs) const {
  std::vector<LexicalFeatures> lex;
  lex.reserve(tokens.size());
  for (const auto& t : tokens) lex.push_back(extract_features(t, subs));
  return prepare(lex);
}

template <typename T>
Matrix<T> MultiEmbed<T>::concatenate(const EmbedInput& input) const {
  if (input.rows.size() != features_.size()) {
    throw ConfigError("embed: input lacks rows for an enabled feature");
  }
  const int d = config_.width;
  Matrix<T> x = Matrix<T>::Zero(input.tokens, input_width());
  for (size_t f = 0; f < features_.size(); ++f) {
    const auto& weights = tables_[f].weights().value;
    const int k = tables_[f].indexer().rows_per_symbol();
    const auto& rows = input.rows[f];
    for (int t = 0; t < input.tokens; ++t) {
      auto dst = x.row(t).segment(static_cast<Index>(f) * d, d);
      for (int j = 0; j < k; ++j) dst += weights.row(rows[t * k + j]);
    }
  }
  if (config_.include_static_vectors) {
    const Index offset = static_cast<Index>(features_.size()) * d;
    x.block(0, offset, input.tokens, static_->width()) =
        input.static_vectors.template cast<T>();
  }
  return x;
}

template <typename T>
Matrix<T> MultiEmbed<T>::forward(const EmbedInput& input,
                                 MultiEmbedCache<T>* cache) const {
  Matrix<T> x = concatenate(input);
  MaxoutCache local;
  Matrix<T> y = projection_.forward(x, cache ? &cache->maxout : &local);
  if (cache) cache->concatenated = std::move(x);
  return y;
}

template <typename T>
void MultiEmbed<T>::backward(const EmbedInput& input, const Matrix<T>& dy,
                             MultiEmbedCache<T>& cache) {
  const Matrix<T> dx = projection_.backward(cache.concatenated, dy, cache.maxout);
  const int d = config_.width;
  for (size_t f = 0; f < features_.size(); ++f) {
    auto& grad = tables_[f].weights().grad;
    const int k = tables_[f].indexer().rows_per_symbol();
    const auto& rows = input.rows[f];
    for (int t = 0; t < input.tokens; ++t) {
      const auto src = dx.row(t).segment(static_cast<Index>(f) * d, d);
      for (int j = 0; j < k; ++j) grad.row(rows[t * k + j]) += src;
    }
  }
}

template <typename T>
void MultiEmbed<T>::collect(ParamList<T>& out) {
  for (auto& t : tables_) out.push_back(&t.weights());
  projection_.collect(out);
}

template class MultiEmbed<float>;
template class MultiEmbed<double>;

}  // namespace hashner
