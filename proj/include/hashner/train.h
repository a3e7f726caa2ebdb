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

#ifndef HASHNER_TRAIN_H_
#define HASHNER_TRAIN_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "hashner/data.h"
#include "hashner/evaluate.h"
#include "hashner/model.h"
#include "hashner/nn.h"

namespace hashner {

struct TrainConfig {
  int max_steps = 20000;
  int patience = 1600;
  int eval_frequency = 200;
  int batch_words = 1000;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.01;
  double grad_clip = 1.0;
  double dropout = 0.1;
  uint64_t seed = 0;

  AdamWConfig adamw() const;
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Lookup-strategy vocabularies for `config` over `train`.
std::vector<Vocabulary> lookup_vocabularies(const MultiEmbedConfig& config,
                                            const Corpus& train);

// Builds a model for `train`: fills in labels when none are configured,
// derives lookup vocabularies when that strategy is selected, and
// initializes parameters from `seed`.
template <typename T>
std::unique_ptr<NerModel<T>> build_model(ModelConfig config, const Corpus& train,
                                         std::shared_ptr<const StaticVectorTable> vectors,
                                         uint64_t seed);

// Embedding rows and gold action spans, resolved once per corpus.
struct PreparedCorpus {
  std::vector<EmbedInput> inputs;
  std::vector<std::vector<Span>> gold;

  size_t size() const { return inputs.size(); }
  int words(size_t i) const { return inputs[i].tokens; }
};

// Throws ValidationError on labels the model does not know when
// `with_gold` is set.
template <typename T>
PreparedCorpus prepare_corpus(const NerModel<T>& model, const Corpus& corpus,
                              bool with_gold = true);

// Consecutive documents of `order` packed until each batch holds at least
// `batch_words` tokens; the last batch may be smaller.
std::vector<Batch> pack_batches(const PreparedCorpus& data, std::span<const size_t> order,
                                int batch_words);

struct ImitationResult {
  double loss = 0.0;
  int steps = 0;
  // Spans reached by following the model (the exploration policy).
  std::vector<std::vector<Span>> followed;
};

// One pass of the transition system per document. At each state the target
// is uniform over zero-cost valid actions and the loss is the cross-entropy
// of the masked softmax, summed over states and documents. The pass then
// continues with the model's highest-scoring valid action. Gradients are
// accumulated into the model (callers zero them first).
template <typename T>
ImitationResult imitation_update(NerModel<T>& model, const Batch& batch,
                                 Rng* dropout_rng = nullptr, double dropout = 0.0);

struct HistoryEntry {
  int step = 0;
  double loss = 0.0;  // mean batch loss since the previous entry
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;
  double best_f1 = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  int steps = 0;
  int best_step = 0;
  double best_f1 = 0.0;
  bool early_stopped = false;
  std::vector<HistoryEntry> history;
};

struct TrainHooks {
  std::ostream* history = nullptr;  // JSON lines
  std::ostream* log = nullptr;      // human-readable progress
};

// Trains with AdamW and global-norm clipping, evaluating dev F1 every
// eval_frequency steps. Stops after max_steps or once dev F1 has not
// improved for `patience` steps, then restores the best checkpoint.
template <typename T>
TrainResult train(NerModel<T>& model, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const TrainConfig& config, const TrainHooks& hooks = {});

template <typename T>
std::vector<std::vector<EntitySpan>> predict(const NerModel<T>& model, const Corpus& corpus,
                                             int batch_words = 1000);

template <typename T>
EvalReport evaluate(const NerModel<T>& model, const Corpus& corpus,
                    const std::unordered_set<std::string>* known = nullptr);

struct SeedRun {
  uint64_t seed = 0;
  EvalReport report;
  TrainResult training;
};

struct MultiSeedResult {
  std::vector<SeedRun> runs;
  double mean_f1 = 0.0;
  double stddev_f1 = 0.0;
  std::optional<double> mean_seen_f1;
  std::optional<double> mean_unseen_f1;

  nlohmann::json to_json() const;
};

// Calls `run` once per seed and aggregates micro F1 (population stddev).
MultiSeedResult multi_seed_run(std::span<const uint64_t> seeds,
                               const std::function<SeedRun(uint64_t)>& run);

}  // namespace hashner

#endif  // HASHNER_TRAIN_H_
