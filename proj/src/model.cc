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

#include <algorithm>

#include "hashner/errors.h"

namespace hashner {

void NerModelConfig::validate() const {
  if (state_tokens < 1) throw ConfigError("ner.state_tokens: must be >= 1");
  if (hidden_width < 1) throw ConfigError("ner.hidden_width: must be > 0");
  if (maxout_pieces < 1) throw ConfigError("ner.maxout_pieces: must be >= 1");
  if (labels.empty()) throw ConfigError("ner.labels: at least one label");
  ActionSpace check(labels);
}

void ModelConfig::validate() const {
  embed.validate();
  encoder.validate();
  ner.validate();
  if (embed.width != encoder.width) {
    throw ConfigError("encoder.width: must equal embed.width (" +
                      std::to_string(embed.width) + ")");
  }
}

void Batch::add(const EmbedInput& doc, std::vector<Span> gold_spans) {
  input.append(doc);
  offsets.push_back(offsets.back() + doc.tokens);
  gold.push_back(std::move(gold_spans));
}

// ---------------------------------------------------------------------------
// StateScorer

template <typename T>
StateScorer<T>::StateScorer(int token_width, int slots, int hidden, int pieces,
                            int actions)
    : token_width_(token_width),
      slots_(slots),
      state_("ner.state", static_cast<Index>(slots) * token_width, hidden, pieces),
      output_("ner.output", hidden, actions) {}

template <typename T>
void StateScorer<T>::init(Rng& rng) {
  state_.init(rng);
  output_.init(rng);
}

template <typename T>
Matrix<T> StateScorer<T>::precompute(const Matrix<T>& tokens) const {
  const Index d = token_width_;
  const Index hp = state_.weight().cols();
  Matrix<T> out(tokens.rows(), slots_ * hp);
  for (int s = 0; s < slots_; ++s) {
    out.middleCols(s * hp, hp).noalias() =
        tokens * state_.weight().value.middleRows(s * d, d);
  }
  return out;
}

template <typename T>
Matrix<T> StateScorer<T>::backward_precompute(const Matrix<T>& tokens,
                                              const Matrix<T>& dprecomputed) {
  const Index d = token_width_;
  const Index hp = state_.weight().cols();
  Matrix<T> dtokens = Matrix<T>::Zero(tokens.rows(), d);
  for (int s = 0; s < slots_; ++s) {
    const auto block = dprecomputed.middleCols(s * hp, hp);
    state_.weight().grad.middleRows(s * d, d).noalias() += tokens.transpose() * block;
    dtokens.noalias() += block * state_.weight().value.middleRows(s * d, d).transpose();
  }
  return dtokens;
}

template <typename T>
Matrix<T> StateScorer<T>::state_preactivation(const Matrix<T>& precomputed,
                                              std::span<const int> slot_tokens) const {
  const Index hp = state_.weight().cols();
  const Index states = static_cast<Index>(slot_tokens.size()) / slots_;
  Matrix<T> z(states, hp);
  z.rowwise() = state_.bias().value.row(0);
  for (Index i = 0; i < states; ++i) {
    for (int s = 0; s < slots_; ++s) {
      const int tok = slot_tokens[i * slots_ + s];
      if (tok >= 0) z.row(i) += precomputed.row(tok).segment(s * hp, hp);
    }
  }
  return z;
}

template <typename T>
Matrix<T> StateScorer<T>::logits(const Matrix<T>& z, Matrix<T>* hidden,
                                 MaxoutCache* cache) const {
  Matrix<T> h = Maxout<T>::reduce(z, state_.pieces(), cache);
  Matrix<T> out = output_.forward(h);
  if (hidden) *hidden = std::move(h);
  return out;
}

template <typename T>
void StateScorer<T>::backward_states(const Matrix<T>& hidden,
                                     const Matrix<T>& dlogits,
                                     const MaxoutCache& cache,
                                     std::span<const int> slot_tokens,
                                     Matrix<T>& dprecomputed) {
  const Matrix<T> dh = output_.backward(hidden, dlogits);
  const Matrix<T> dz = Maxout<T>::expand(dh, state_.pieces(), cache);
  state_.bias().grad.row(0) += dz.colwise().sum();
  const Index hp = state_.weight().cols();
  for (Index i = 0; i < dz.rows(); ++i) {
    for (int s = 0; s < slots_; ++s) {
      const int tok = slot_tokens[i * slots_ + s];
      if (tok >= 0) dprecomputed.row(tok).segment(s * hp, hp) += dz.row(i);
    }
  }
}

template <typename T>
RowVector<T> StateScorer<T>::score_actions(const Matrix<T>& slot_vectors,
                                           std::span<const uint8_t> mask) const {
  if (slot_vectors.rows() != slots_ || slot_vectors.cols() != token_width_) {
    throw std::invalid_argument("score_actions: expected slots x width input");
  }
  Matrix<T> concat(1, slot_vectors.size());
  for (int s = 0; s < slots_; ++s) {
    concat.row(0).segment(s * token_width_, token_width_) = slot_vectors.row(s);
  }
  const Matrix<T> h = state_.forward(concat, nullptr);
  const Matrix<T> z = output_.forward(h);
  return masked_softmax<T>(z.row(0), mask);
}

template <typename T>
void StateScorer<T>::collect(ParamList<T>& out) {
  state_.collect(out);
  output_.collect(out);
}

// ---------------------------------------------------------------------------
// NerModel

namespace {
const ModelConfig& validated(const ModelConfig& c) {
  c.validate();
  return c;
}
}  // namespace

template <typename T>
NerModel<T>::NerModel(const ModelConfig& config, std::vector<Vocabulary> vocabularies,
                      std::shared_ptr<const StaticVectorTable> static_vectors)
    : config_(validated(config)),
      actions_(config.ner.labels),
      embed_(config.embed, std::move(vocabularies), std::move(static_vectors)),
      encoder_(config.encoder),
      scorer_(config.encoder.width, config.ner.state_tokens, config.ner.hidden_width,
              config.ner.maxout_pieces, actions_.size()) {}

template <typename T>
void NerModel<T>::init(uint64_t seed) {
  Rng root(seed);
  Rng embed_rng = root.split(1);
  Rng encoder_rng = root.split(2);
  Rng scorer_rng = root.split(3);
  embed_.init(embed_rng);
  encoder_.init(encoder_rng);
  scorer_.init(scorer_rng);
}

template <typename T>
ParamList<T> NerModel<T>::parameters() {
  ParamList<T> out;
  embed_.collect(out);
  encoder_.collect(out);
  scorer_.collect(out);
  return out;
}

template <typename T>
void NerModel<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
size_t NerModel<T>::parameter_count() {
  size_t n = 0;
  for (auto* p : parameters()) n += static_cast<size_t>(p->size());
  return n;
}

template <typename T>
void NerModel<T>::encode(const Batch& batch, ForwardCache<T>& cache, Rng* dropout_rng,
                         double dropout) const {
  const Matrix<T> embedded = embed_.forward(batch.input, &cache.embed);
  cache.tokens =
      encoder_.forward(embedded, batch.offsets, &cache.encoder, dropout_rng, dropout);
  cache.precomputed = scorer_.precompute(cache.tokens);
}

template <typename T>
void NerModel<T>::backward_encode(const Batch& batch, const Matrix<T>& dprecomputed,
                                  ForwardCache<T>& cache) {
  const Matrix<T> dtokens = scorer_.backward_precompute(cache.tokens, dprecomputed);
  const Matrix<T> dembedded = encoder_.backward(dtokens, batch.offsets, cache.encoder);
  embed_.backward(batch.input, dembedded, cache.embed);
}

template <typename T>
std::vector<std::vector<Span>> NerModel<T>::decode(const Batch& batch) const {
  const int docs = batch.documents();
  std::vector<std::vector<Span>> result(docs);
  if (batch.input.tokens == 0) return result;

  const Matrix<T> embedded = embed_.forward(batch.input, nullptr);
  const Matrix<T> tokens = encoder_.forward(embedded, batch.offsets, nullptr);
  const Matrix<T> precomputed = scorer_.precompute(tokens);

  std::vector<TransitionState> states;
  states.reserve(docs);
  for (int d = 0; d < docs; ++d) states.emplace_back(batch.length(d));
  const int slots = scorer_.slots();
  std::vector<int> active;
  std::vector<int> slot_tokens;
  std::vector<uint8_t> mask(actions_.size());
  while (true) {
    active.clear();
    for (int d = 0; d < docs; ++d) {
      if (!states[d].is_terminal()) active.push_back(d);
    }
    if (active.empty()) break;
    slot_tokens.assign(active.size() * slots, -1);
    for (size_t i = 0; i < active.size(); ++i) {
      const int d = active[i];
      std::span<int> out(slot_tokens.data() + i * slots, slots);
      state_feature_tokens(states[d], out);
      for (int& t : out) {
        if (t >= 0) t += batch.offsets[d];
      }
    }
    const Matrix<T> z = scorer_.state_preactivation(precomputed, slot_tokens);
    const Matrix<T> scores = scorer_.logits(z, nullptr, nullptr);
    for (size_t i = 0; i < active.size(); ++i) {
      TransitionState& state = states[active[i]];
      for (int a = 0; a < actions_.size(); ++a) {
        mask[a] = state.is_valid(actions_.decode(a)) ? 1 : 0;
      }
      const int best = argmax_valid(scores.row(i).data(), mask);
      state.apply(actions_.decode(best));
    }
  }
  for (int d = 0; d < docs; ++d) {
    result[d] = states[d].completed();
    std::sort(result[d].begin(), result[d].end());
  }
  return result;
}

template <typename T>
std::vector<EntitySpan> NerModel<T>::decode_tokens(
    std::span<const std::string> tokens) const {
  Batch batch;
  batch.add(embed_.prepare_tokens(tokens));
  return actions_.to_names(decode(batch)[0]);
}

template class StateScorer<float>;
template class StateScorer<double>;
template class NerModel<float>;
template class NerModel<double>;

}  // namespace hashner
