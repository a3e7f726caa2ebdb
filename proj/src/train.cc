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

#include "hashner/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hashner/errors.h"

namespace hashner {

AdamWConfig TrainConfig::adamw() const {
  return AdamWConfig{learning_rate, beta1, beta2, weight_decay, 1e-8};
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(std::string("training.") + key + ": must be > 0");
  };
  positive(max_steps, "max_steps");
  positive(patience, "patience");
  positive(eval_frequency, "eval_frequency");
  positive(batch_words, "batch_words");
  positive(learning_rate, "learning_rate");
  positive(grad_clip, "grad_clip");
  if (patience % eval_frequency != 0) {
    throw ConfigError("training.patience: must be a multiple of eval_frequency");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("training.beta1: must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("training.beta2: must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("training.weight_decay: must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("training.dropout: must be in [0, 1)");
  }
}

std::vector<Vocabulary> lookup_vocabularies(const MultiEmbedConfig& config,
                                            const Corpus& train) {
  std::vector<std::vector<LexicalFeatures>> docs;
  docs.reserve(train.size());
  for (const auto& doc : train) {
    std::vector<LexicalFeatures> lex;
    lex.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) lex.push_back(extract_features(t));
    docs.push_back(std::move(lex));
  }
  return build_feature_vocabs(docs, config.ordered_features(), config.min_frequency);
}

template <typename T>
std::unique_ptr<NerModel<T>> build_model(ModelConfig config, const Corpus& train,
                                         std::shared_ptr<const StaticVectorTable> vectors,
                                         uint64_t seed) {
  if (config.ner.labels.empty()) config.ner.labels = corpus_labels(train);
  if (config.ner.labels.empty()) {
    throw ConfigError("ner.labels: none configured and the training corpus has no entities");
  }
  std::vector<Vocabulary> vocabs;
  if (config.embed.strategy == EmbedStrategy::kLookup) {
    vocabs = lookup_vocabularies(config.embed, train);
  }
  auto model = std::make_unique<NerModel<T>>(config, std::move(vocabs), std::move(vectors));
  model->init(seed);
  return model;
}

template <typename T>
PreparedCorpus prepare_corpus(const NerModel<T>& model, const Corpus& corpus,
                              bool with_gold) {
  PreparedCorpus out;
  out.inputs.reserve(corpus.size());
  for (const auto& doc : corpus) {
    out.inputs.push_back(model.embed().prepare_tokens(doc.tokens));
    if (!with_gold) continue;
    std::vector<Span> gold;
    for (const auto& e : doc.entities) {
      const int label = model.actions().label_id(e.label);
      if (label < 0) {
        throw ValidationError(doc.id + ": label \"" + e.label + "\" is not in the model");
      }
      gold.push_back(Span{e.start, e.end, label});
    }
    std::sort(gold.begin(), gold.end());
    GoldIndex check(doc.length(), gold);
    out.gold.push_back(std::move(gold));
  }
  return out;
}

std::vector<Batch> pack_batches(const PreparedCorpus& data, std::span<const size_t> order,
                                int batch_words) {
  std::vector<Batch> batches;
  Batch current;
  int words = 0;
  for (size_t i : order) {
    current.add(data.inputs[i], data.gold.empty() ? std::vector<Span>{} : data.gold[i]);
    words += data.words(i);
    if (words >= batch_words) {
      batches.push_back(std::move(current));
      current = Batch{};
      words = 0;
    }
  }
  if (current.documents() > 0) batches.push_back(std::move(current));
  return batches;
}

template <typename T>
ImitationResult imitation_update(NerModel<T>& model, const Batch& batch, Rng* dropout_rng,
                                 double dropout) {
  ImitationResult result;
  const int docs = batch.documents();
  result.followed.resize(docs);
  if (batch.input.tokens == 0) return result;

  ForwardCache<T> cache;
  model.encode(batch, cache, dropout_rng, dropout);
  Matrix<T> dprecomputed =
      Matrix<T>::Zero(cache.precomputed.rows(), cache.precomputed.cols());

  const ActionSpace& actions = model.actions();
  const int num_actions = actions.size();
  auto& scorer = model.scorer();
  const int slots = scorer.slots();

  std::vector<TransitionState> states;
  std::vector<GoldIndex> golds;
  states.reserve(docs);
  golds.reserve(docs);
  for (int d = 0; d < docs; ++d) {
    states.emplace_back(batch.length(d));
    golds.emplace_back(batch.length(d), batch.gold[d]);
  }

  std::vector<int> active;
  std::vector<int> slot_tokens;
  std::vector<uint8_t> mask(num_actions);
  std::vector<double> logp(num_actions);
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
    const Matrix<T> z = scorer.state_preactivation(cache.precomputed, slot_tokens);
    Matrix<T> hidden;
    MaxoutCache maxout_cache;
    const Matrix<T> logits = scorer.logits(z, &hidden, &maxout_cache);
    Matrix<T> dlogits = Matrix<T>::Zero(logits.rows(), logits.cols());

    for (size_t i = 0; i < active.size(); ++i) {
      TransitionState& state = states[active[i]];
      const auto costs = oracle_costs(state, golds[active[i]], actions);
      double shift = -std::numeric_limits<double>::infinity();
      int zero_cost = 0;
      for (int a = 0; a < num_actions; ++a) {
        mask[a] = costs[a] != kInvalidCost;
        if (mask[a]) shift = std::max(shift, static_cast<double>(logits(i, a)));
        if (mask[a] && costs[a] == 0) ++zero_cost;
      }
      double total = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        if (mask[a]) total += std::exp(static_cast<double>(logits(i, a)) - shift);
      }
      const double lse = shift + std::log(total);
      const double target = 1.0 / zero_cost;
      for (int a = 0; a < num_actions; ++a) {
        if (!mask[a]) continue;
        logp[a] = static_cast<double>(logits(i, a)) - lse;
        const bool gold = costs[a] == 0;
        if (gold) result.loss -= target * logp[a];
        dlogits(i, a) = static_cast<T>(std::exp(logp[a]) - (gold ? target : 0.0));
      }
      const int next = argmax_valid(logits.row(i).data(), mask);
      state.apply(actions.decode(next));
      ++result.steps;
    }
    scorer.backward_states(hidden, dlogits, maxout_cache, slot_tokens, dprecomputed);
  }
  model.backward_encode(batch, dprecomputed, cache);
  for (int d = 0; d < docs; ++d) result.followed[d] = states[d].completed();
  return result;
}

nlohmann::json HistoryEntry::to_json() const {
  return {{"step", step},
          {"loss", loss},
          {"dev_precision", dev_precision},
          {"dev_recall", dev_recall},
          {"dev_f1", dev_f1},
          {"best_f1", best_f1}};
}

template <typename T>
TrainResult train(NerModel<T>& model, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (train_corpus.empty()) throw ValidationError("train: training corpus is empty");
  if (dev_corpus.empty()) throw ValidationError("train: development corpus is empty");
  const PreparedCorpus data = prepare_corpus(model, train_corpus);

  auto params = model.parameters();
  AdamW<T> optimizer(config.adamw(), params);
  const Rng root(config.seed);
  Rng shuffle_rng = root.split(101);
  Rng dropout_rng = root.split(102);

  std::vector<Matrix<T>> best(params.size());
  auto snapshot = [&]() {
    for (size_t i = 0; i < params.size(); ++i) best[i] = params[i]->value;
  };
  snapshot();

  TrainResult result;
  result.best_f1 = -1.0;
  std::vector<size_t> order(data.size());
  std::vector<Batch> batches;
  size_t next = 0;
  double window_loss = 0.0;
  int window_steps = 0;
  while (result.steps < config.max_steps) {
    if (next == batches.size()) {
      std::iota(order.begin(), order.end(), size_t{0});
      shuffle_rng.shuffle(order.begin(), order.end());
      batches = pack_batches(data, order, config.batch_words);
      next = 0;
    }
    const Batch& batch = batches[next++];
    model.zero_grad();
    const auto update = imitation_update(
        model, batch, config.dropout > 0.0 ? &dropout_rng : nullptr, config.dropout);
    if (!std::isfinite(update.loss)) {
      throw std::runtime_error("train: non-finite loss at step " +
                               std::to_string(result.steps + 1));
    }
    clip_gradients<T>(params, config.grad_clip);
    optimizer.step();
    ++result.steps;
    window_loss += update.loss;
    ++window_steps;

    if (result.steps % config.eval_frequency != 0 && result.steps != config.max_steps) {
      continue;
    }
    const EvalReport dev = evaluate(model, dev_corpus);
    if (dev.micro.f1 > result.best_f1) {
      result.best_f1 = dev.micro.f1;
      result.best_step = result.steps;
      snapshot();
    }
    HistoryEntry entry;
    entry.step = result.steps;
    entry.loss = window_loss / window_steps;
    entry.dev_precision = dev.micro.precision;
    entry.dev_recall = dev.micro.recall;
    entry.dev_f1 = dev.micro.f1;
    entry.best_f1 = result.best_f1;
    result.history.push_back(entry);
    window_loss = 0.0;
    window_steps = 0;
    if (hooks.history) *hooks.history << entry.to_json().dump() << '\n' << std::flush;
    if (hooks.log) {
      *hooks.log << "step " << entry.step << "  loss " << entry.loss << "  dev F1 "
                 << entry.dev_f1 << "  best " << entry.best_f1 << '\n'
                 << std::flush;
    }
    if (result.steps - result.best_step >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  return result;
}

template <typename T>
std::vector<std::vector<EntitySpan>> predict(const NerModel<T>& model, const Corpus& corpus,
                                             int batch_words) {
  const PreparedCorpus data = prepare_corpus(model, corpus, false);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<std::vector<EntitySpan>> out;
  out.reserve(corpus.size());
  for (const auto& batch : pack_batches(data, order, batch_words)) {
    for (const auto& spans : model.decode(batch)) {
      out.push_back(model.actions().to_names(spans));
    }
  }
  return out;
}

template <typename T>
EvalReport evaluate(const NerModel<T>& model, const Corpus& corpus,
                    const std::unordered_set<std::string>* known) {
  return score_corpus(corpus, predict(model, corpus), known);
}

nlohmann::json MultiSeedResult::to_json() const {
  nlohmann::json j;
  j["mean_f1"] = mean_f1;
  j["stddev_f1"] = stddev_f1;
  if (mean_seen_f1) j["mean_seen_f1"] = *mean_seen_f1;
  if (mean_unseen_f1) j["mean_unseen_f1"] = *mean_unseen_f1;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    j["runs"].push_back({{"seed", r.seed},
                         {"f1", r.report.micro.f1},
                         {"steps", r.training.steps},
                         {"best_step", r.training.best_step},
                         {"report", r.report.to_json()}});
  }
  return j;
}

MultiSeedResult multi_seed_run(std::span<const uint64_t> seeds,
                               const std::function<SeedRun(uint64_t)>& run) {
  if (seeds.empty()) throw ValidationError("multi_seed_run: at least one seed");
  MultiSeedResult out;
  double seen = 0.0, unseen = 0.0;
  bool has_split = true;
  for (uint64_t s : seeds) {
    out.runs.push_back(run(s));
    const auto& r = out.runs.back().report;
    out.mean_f1 += r.micro.f1;
    if (r.seen && r.unseen) {
      seen += r.seen->f1;
      unseen += r.unseen->f1;
    } else {
      has_split = false;
    }
  }
  const double n = static_cast<double>(seeds.size());
  out.mean_f1 /= n;
  double var = 0.0;
  for (const auto& r : out.runs) var += std::pow(r.report.micro.f1 - out.mean_f1, 2);
  out.stddev_f1 = std::sqrt(var / n);
  if (has_split) {
    out.mean_seen_f1 = seen / n;
    out.mean_unseen_f1 = unseen / n;
  }
  return out;
}

#define HASHNER_INSTANTIATE(T)                                                         \
  template std::unique_ptr<NerModel<T>> build_model<T>(                                \
      ModelConfig, const Corpus&, std::shared_ptr<const StaticVectorTable>, uint64_t); \
  template PreparedCorpus prepare_corpus<T>(const NerModel<T>&, const Corpus&, bool);  \
  template ImitationResult imitation_update<T>(NerModel<T>&, const Batch&, Rng*,       \
                                               double);                                \
  template TrainResult train<T>(NerModel<T>&, const Corpus&, const Corpus&,            \
                                const TrainConfig&, const TrainHooks&);                \
  template std::vector<std::vector<EntitySpan>> predict<T>(const NerModel<T>&,         \
                                                           const Corpus&, int);        \
  template EvalReport evaluate<T>(const NerModel<T>&, const Corpus&,                   \
                                  const std::unordered_set<std::string>*);

HASHNER_INSTANTIATE(float)
HASHNER_INSTANTIATE(double)

#undef HASHNER_INSTANTIATE

}  // namespace hashner
