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

#ifndef HASHNER_MODEL_H_
#define HASHNER_MODEL_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hashner/embed.h"
#include "hashner/encoder.h"
#include "hashner/nn.h"
#include "hashner/transition.h"

namespace hashner {

struct NerModelConfig {
  std::vector<std::string> labels;
  int state_tokens = 6;
  int hidden_width = 64;
  int maxout_pieces = 2;

  void validate() const;
  bool operator==(const NerModelConfig&) const = default;
};

struct ModelConfig {
  MultiEmbedConfig embed;
  EncoderConfig encoder;
  NerModelConfig ner;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Scores transitions from the token vectors named by a state's slots.
//
// The state layer is a maxout over the concatenated slot vectors. Because
// that product splits into one block per slot, every token is multiplied by
// every slot block once per document ("precomputed") and a state only sums
// the rows its slots select. Empty slots contribute nothing.
template <typename T>
class StateScorer {
 public:
  StateScorer(int token_width, int slots, int hidden, int pieces, int actions);

  void init(Rng& rng);

  int slots() const { return slots_; }
  int token_width() const { return token_width_; }
  int num_actions() const { return static_cast<int>(output_.out()); }
  Maxout<T>& state_layer() { return state_; }
  Linear<T>& output_layer() { return output_; }
  const Maxout<T>& state_layer() const { return state_; }
  const Linear<T>& output_layer() const { return output_; }

  // tokens: N x d  ->  N x (slots * hidden * pieces).
  Matrix<T> precompute(const Matrix<T>& tokens) const;
  // Accumulates weight gradients; returns d tokens.
  Matrix<T> backward_precompute(const Matrix<T>& tokens, const Matrix<T>& dprecomputed);

  // Pre-activations for states; `slot_tokens` holds slots() row indices (or
  // -1) per state, row-major.
  Matrix<T> state_preactivation(const Matrix<T>& precomputed,
                                std::span<const int> slot_tokens) const;
  // Hidden layer and logits from pre-activations.
  Matrix<T> logits(const Matrix<T>& z, Matrix<T>* hidden, MaxoutCache* cache) const;
  // Back through output and state layers into d precomputed.
  void backward_states(const Matrix<T>& hidden, const Matrix<T>& dlogits,
                       const MaxoutCache& cache, std::span<const int> slot_tokens,
                       Matrix<T>& dprecomputed);

  // Unbatched reference path: slot_vectors is slots x d (zero rows for
  // empty slots). Returns the masked softmax over actions.
  RowVector<T> score_actions(const Matrix<T>& slot_vectors,
                             std::span<const uint8_t> mask) const;

  void collect(ParamList<T>& out);

 private:
  int token_width_;
  int slots_;
  Maxout<T> state_;
  Linear<T> output_;
};

template <typename T>
struct ForwardCache {
  MultiEmbedCache<T> embed;
  EncoderCache<T> encoder;
  Matrix<T> tokens;       // encoder output
  Matrix<T> precomputed;  // scorer precomputation
};

// Documents packed for one forward pass.
struct Batch {
  EmbedInput input;
  std::vector<int> offsets{0};
  std::vector<std::vector<Span>> gold;

  int documents() const { return static_cast<int>(offsets.size()) - 1; }
  int length(int doc) const { return offsets[doc + 1] - offsets[doc]; }
  void add(const EmbedInput& doc, std::vector<Span> gold_spans = {});
};

template <typename T>
class NerModel {
 public:
  NerModel(const ModelConfig& config, std::vector<Vocabulary> vocabularies = {},
           std::shared_ptr<const StaticVectorTable> static_vectors = nullptr);

  void init(uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ActionSpace& actions() const { return actions_; }
  MultiEmbed<T>& embed() { return embed_; }
  const MultiEmbed<T>& embed() const { return embed_; }
  ConvEncoder<T>& encoder() { return encoder_; }
  const ConvEncoder<T>& encoder() const { return encoder_; }
  StateScorer<T>& scorer() { return scorer_; }
  const StateScorer<T>& scorer() const { return scorer_; }

  ParamList<T> parameters();
  void zero_grad();
  size_t parameter_count();

  // Embedding, encoder and scorer precomputation for a batch.
  void encode(const Batch& batch, ForwardCache<T>& cache, Rng* dropout_rng = nullptr,
              double dropout = 0.0) const;
  void backward_encode(const Batch& batch, const Matrix<T>& dprecomputed,
                       ForwardCache<T>& cache);

  // Greedy decoding: argmax over valid actions until terminal.
  std::vector<std::vector<Span>> decode(const Batch& batch) const;
  std::vector<EntitySpan> decode_tokens(std::span<const std::string> tokens) const;

 private:
  ModelConfig config_;
  ActionSpace actions_;
  MultiEmbed<T> embed_;
  ConvEncoder<T> encoder_;
  StateScorer<T> scorer_;
};

// Highest-scoring valid action; ties go to the lowest id.
template <typename T>
int argmax_valid(const T* scores, std::span<const uint8_t> mask) {
  int best = -1;
  for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
    if (mask[a] && (best < 0 || scores[a] > scores[best])) best = a;
  }
  return best;
}

}  // namespace hashner

#endif  // HASHNER_MODEL_H_
