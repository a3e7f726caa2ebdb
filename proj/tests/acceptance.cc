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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hashner/collision.h"
#include "hashner/data.h"
#include "hashner/errors.h"
#include "hashner/evaluate.h"
#include "hashner/experiments.h"
#include "hashner/grad_check.h"
#include "hashner/rng.h"
#include "hashner/synthetic.h"
#include "hashner/train.h"
#include "hashner/transition.h"

using namespace hashner;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence

// Sets of at most `max_entities` non-overlapping spans over `length` tokens.
void gold_sets(int length, int labels, int max_entities,
               std::vector<std::vector<Span>>& out) {
  std::vector<Span> current;
  std::function<void(int)> rec = [&](int pos) {
    out.push_back(current);
    if (static_cast<int>(current.size()) == max_entities) return;
    for (int start = pos; start < length; ++start) {
      for (int end = start + 1; end <= length; ++end) {
        for (int l = 0; l < labels; ++l) {
          current.push_back(Span{start, end, l});
          rec(end);
          current.pop_back();
        }
      }
    }
  };
  rec(0);
}

struct OracleStats {
  long states = 0;
  long mismatches = 0;
};

// Post-order walk; returns the brute-force value of `s` and checks every
// valid action's oracle cost against the children's brute-force values.
int check_oracle(const TransitionState& s, const GoldIndex& index, std::span<const Span> gold,
                 const ActionSpace& actions, OracleStats& stats) {
  ++stats.states;
  const int value = brute_force_value(s, gold, actions);
  if (optimal_value(s, index) != value) ++stats.mismatches;
  if (s.is_terminal()) return value;
  const auto costs = oracle_costs(s, index, actions);
  const auto valid = valid_actions(s, actions);
  for (int a = 0; a < actions.size(); ++a) {
    if (!valid[a]) {
      if (costs[a] != kInvalidCost) ++stats.mismatches;
      continue;
    }
    const int child = check_oracle(apply_action(s, actions.decode(a)), index, gold, actions, stats);
    if (costs[a] != value - child) ++stats.mismatches;
  }
  return value;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  OracleStats stats;
  long sets = 0;
  for (int labels = 1; labels <= 2; ++labels) {
    std::vector<std::string> names = {"A", "B"};
    names.resize(labels);
    const ActionSpace actions(names);
    for (int n = 0; n <= 6; ++n) {
      std::vector<std::vector<Span>> all;
      gold_sets(n, labels, 2, all);
      for (const auto& gold : all) {
        ++sets;
        const GoldIndex index(n, gold);
        check_oracle(TransitionState(n), index, gold, actions, stats);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {stats.mismatches == 0 && secs < 60.0,
          std::to_string(sets) + " gold sets, " + std::to_string(stats.states) + " states, " +
              std::to_string(stats.mismatches) + " mismatches, " + fmt("%.1f s", secs)};
}

// ---------------------------------------------------------------------------
// 2. Gold-path completeness

Outcome gold_path() {
  SyntheticConfig sc;
  sc.sentences = 1000;
  sc.seed = 21;
  const Corpus docs = generate_synthetic(sc);
  const ActionSpace actions(corpus_labels(docs));
  Rng rng(5);
  int failures = 0;
  for (const auto& doc : docs) {
    const auto gold = actions.to_ids(doc.entities);
    const GoldIndex index(doc.length(), gold);
    TransitionState s(doc.length());
    while (!s.is_terminal()) {
      const auto costs = oracle_costs(s, index, actions);
      std::vector<int> zero;
      for (int a = 0; a < actions.size(); ++a) {
        if (costs[a] == 0) zero.push_back(a);
      }
      if (zero.empty()) break;
      s.apply(actions.decode(zero[rng.below(zero.size())]));
    }
    auto got = s.completed();
    std::sort(got.begin(), got.end());
    auto want = gold;
    std::sort(want.begin(), want.end());
    if (!s.is_terminal() || got != want || optimal_value(s, index) != 0) ++failures;
  }
  return {failures == 0, std::to_string(docs.size()) + " documents, " +
                             std::to_string(failures) + " failures"};
}

// ---------------------------------------------------------------------------
// 3. Gradient checks

Outcome gradient_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticConfig sc;
  sc.sentences = 200;
  sc.seed = 33;
  const Corpus pool = generate_synthetic(sc);
  Rng rng(17);
  BlockError worst;
  int failed = 0;
  for (int instance = 0; instance < 20; ++instance) {
    ModelConfig c;
    const int width = 8 + 8 * static_cast<int>(rng.below(3));
    c.embed.width = c.encoder.width = width;
    c.encoder.depth = 1 + static_cast<int>(rng.below(4));
    c.embed.hash_count = 1 + static_cast<int>(rng.below(4));
    c.embed.rows = {{Feature::kNorm, 97}, {Feature::kPrefix, 31}, {Feature::kSuffix, 61},
                    {Feature::kShape, 29}};
    c.ner.hidden_width = 4 + static_cast<int>(rng.below(8));
    const Corpus docs = {pool[rng.below(pool.size())], pool[rng.below(pool.size())]};
    auto model = build_model<double>(c, pool, nullptr, 100 + instance);
    const auto data = prepare_corpus(*model, docs);
    Batch batch;
    for (size_t i = 0; i < data.size(); ++i) batch.add(data.inputs[i], data.gold[i]);
    auto params = model->parameters();
    auto loss = [&](bool backward) {
      if (backward) {
        model->zero_grad();
        return imitation_update(*model, batch).loss;
      }
      std::vector<Matrix<double>> saved;
      for (auto* p : params) saved.push_back(p->grad);
      const double l = imitation_update(*model, batch).loss;
      for (size_t i = 0; i < params.size(); ++i) params[i]->grad = saved[i];
      return l;
    };
    GradCheckOptions opts;
    opts.max_coordinates = 12;
    opts.seed = 1000 + instance;
    const auto report = grad_check(loss, params, 1e-4, opts);
    if (!report.passed) ++failed;
    for (const auto& block : report.blocks) {
      if (block.max_relative_error > worst.max_relative_error) worst = block;
    }
  }
  return {failed == 0, "20 instances, " + std::to_string(failed) +
                           " failed, max rel. error " + fmt("%.2e", worst.max_relative_error) +
                           " at " + worst.name + " (analytic " + fmt("%.6e", worst.analytic) +
                           ", numeric " + fmt("%.6e", worst.numeric) + "), " +
                           fmt("%.1f s", seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 4. Collision math

Outcome collision_math() {
  const auto sim = simulate_collisions(5000, 1, 50000, 20, 4);
  const double p = collision_probability(5000, 50000);
  const bool sim_ok = std::abs(sim.fraction - p) <= 3 * sim.stderr_ && sim.stderr_ > 0 &&
                      std::abs(p - 0.99995) < 5e-6;

  bool reduce_ok = true;
  const std::vector<uint64_t> ns = {1, 10, 100, 5000, 1000000};
  const std::vector<int> ks = {1, 2, 3, 4, 5};
  const std::vector<uint64_t> vs = {1, 2, 100, 50000, 1000000};
  for (uint64_t n : ns) {
    for (uint64_t v : vs) {
      if (signature_collision_probability(n, 1, v) != collision_probability(n, v)) {
        reduce_ok = false;
      }
      const long double direct =
          1.0L - std::pow(1.0L - 1.0L / n, static_cast<long double>(v - 1));
      if (std::abs(static_cast<long double>(collision_probability(n, v)) - direct) >
          1e-12L) {
        reduce_ok = false;
      }
    }
  }
  int violations = 0;
  for (size_t a = 0; a < ns.size(); ++a) {
    for (size_t b = 0; b < ks.size(); ++b) {
      for (size_t c = 0; c < vs.size(); ++c) {
        const double here = signature_collision_probability(ns[a], ks[b], vs[c]);
        if (here < 0.0 || here > 1.0) ++violations;
        if (a + 1 < ns.size() &&
            signature_collision_probability(ns[a + 1], ks[b], vs[c]) > here) {
          ++violations;
        }
        if (b + 1 < ks.size() &&
            signature_collision_probability(ns[a], ks[b + 1], vs[c]) > here) {
          ++violations;
        }
        if (c + 1 < vs.size() &&
            signature_collision_probability(ns[a], ks[b], vs[c + 1]) < here) {
          ++violations;
        }
      }
    }
  }
  return {sim_ok && reduce_ok && violations == 0,
          "simulated " + fmt("%.6f", sim.fraction) + " +- " + fmt("%.1e", sim.stderr_) +
              " vs " + fmt("%.6f", p) + "; k=1 reduction " + (reduce_ok ? "exact" : "BROKEN") +
              "; " + std::to_string(violations) + " monotonicity violations on 5x5x5"};
}

// ---------------------------------------------------------------------------
// Shared synthetic data for the training criteria.

Split synthetic_split(int sentences, uint64_t seed) {
  SyntheticConfig sc;
  sc.sentences = sentences;
  sc.seed = seed;
  return random_split(generate_synthetic(sc), {0.8, 0.1, 0.1}, seed);
}

// 5. Synthetic convergence

Outcome convergence() {
  const Split s = synthetic_split(5000, 1);
  TrainConfig tc;  // defaults throughout
  tc.max_steps = 2000;
  tc.seed = 1;
  const auto t0 = std::chrono::steady_clock::now();
  auto model = build_model<float>(ModelConfig{}, s.train, nullptr, tc.seed);
  const auto r = train(*model, s.train, s.dev, tc);
  const double secs = seconds_since(t0);
  int reached = -1;
  for (const auto& h : r.history) {
    if (h.dev_f1 >= 0.99) {
      reached = h.step;
      break;
    }
  }
  return {reached > 0 && reached <= 2000 && secs < 300.0,
          "dev F1 >= 0.99 at step " + std::to_string(reached) + ", best " +
              fmt("%.4f", r.best_f1) + ", " + std::to_string(r.steps) + " steps in " +
              fmt("%.0f s", secs)};
}

// Reduced budget for the multi-run sweeps.
TrainConfig sweep_training() {
  TrainConfig tc;
  tc.max_steps = 800;
  tc.eval_frequency = 100;
  tc.patience = 300;
  return tc;
}

struct SweepData {
  ExperimentData data;
  std::vector<VariantResult> embed;  // hash, lookup, hash at 10% rows
};

SweepData& sweep_data() {
  static SweepData d = [] {
    SweepData out;
    const Split s = synthetic_split(2000, 7);
    out.data = ExperimentData{s.train, s.dev, s.test};
    return out;
  }();
  return d;
}

const std::vector<uint64_t> kSeeds = {1, 2, 3};

// 6 and 7 share runs.
const std::vector<VariantResult>& embed_runs() {
  SweepData& d = sweep_data();
  if (d.embed.empty()) {
    const ModelConfig base;
    auto variants = embed_comparison_variants(base, d.data.train);
    variants.resize(2);  // hash defaults, lookup
    const double tenth = 0.1;
    auto reduced = row_fraction_variants(base, d.data.train, std::span<const double>(&tenth, 1));
    variants.push_back(reduced.front());
    d.embed = run_variants(variants, d.data, sweep_training(), kSeeds, nullptr, &std::cerr);
    std::cout << results_table(d.embed).to_markdown() << std::flush;
  }
  return d.embed;
}

Outcome hash_vs_lookup() {
  const auto& r = embed_runs();
  const double gap = 100.0 * std::abs(r[0].result.mean_f1 - r[1].result.mean_f1);
  return {gap <= 2.0, "MultiHashEmbed " + fmt("%.2f", 100 * r[0].result.mean_f1) +
                          " vs MultiEmbed " + fmt("%.2f", 100 * r[1].result.mean_f1) +
                          " (gap " + fmt("%.2f", gap) + ", 3 seeds)"};
}

Outcome row_reduction() {
  const auto& r = embed_runs();
  const double loss = 100.0 * (r[0].result.mean_f1 - r[2].result.mean_f1);
  return {loss <= 3.0, r[2].name + " " + fmt("%.2f", 100 * r[2].result.mean_f1) +
                           " vs default " + fmt("%.2f", 100 * r[0].result.mean_f1) +
                           " (loss " + fmt("%.2f", loss) + ", 3 seeds)"};
}

// 8. Feature ablation

Outcome ablation() {
  SweepData& d = sweep_data();
  const std::vector<uint64_t> seed = {1};
  const auto results =
      run_variants(ablation_variants(ModelConfig{}), d.data, sweep_training(), seed, nullptr,
                   &std::cerr);
  const Table table = relative_error_table(results);
  std::cout << table.to_markdown() << std::flush;
  const double drop = 100.0 * (results[0].result.mean_f1 - results[1].result.mean_f1);
  const bool shaped = results.size() == 5 && results[1].name == "NORM+PREFIX+SUFFIX" &&
                      results[4].name == "ORTH" && table.rows.size() == 5;
  return {shaped && drop >= 5.0,
          std::to_string(results.size()) + " variants; removing SHAPE: " +
              fmt("%.2f", 100 * results[0].result.mean_f1) + " -> " +
              fmt("%.2f", 100 * results[1].result.mean_f1) + " (drop " + fmt("%.2f", drop) +
              ")"};
}

// 9. Hash-count sweep

Outcome hash_count() {
  SweepData& d = sweep_data();
  const std::vector<uint64_t> seed = {1};
  std::vector<VariantResult> results;
  try {
    results = run_variants(hash_count_variants(ModelConfig{}), d.data, sweep_training(), seed,
                           nullptr, &std::cerr);
  } catch (const std::exception& e) {
    return {false, std::string("training failed: ") + e.what()};
  }
  std::cout << results_table(results).to_markdown() << std::flush;
  bool finite = true;
  std::ostringstream f1s;
  for (const auto& r : results) {
    for (const auto& run : r.result.runs) {
      for (const auto& h : run.training.history) finite = finite && std::isfinite(h.loss);
    }
    f1s << r.name << ":" << fmt("%.2f", 100 * r.result.mean_f1) << " ";
  }
  return {results.size() == 4 && finite, f1s.str() + (finite ? "all losses finite" : "NON-FINITE")};
}

// 10. Determinism

Outcome determinism() {
  const Split s = synthetic_split(1000, 11);
  TrainConfig tc = sweep_training();
  tc.max_steps = 300;
  tc.seed = 9;
  auto run = [&](std::string* history, std::string* report) {
    auto model = build_model<float>(ModelConfig{}, s.train, nullptr, tc.seed);
    std::ostringstream out;
    TrainHooks hooks;
    hooks.history = &out;
    train(*model, s.train, s.dev, tc, hooks);
    *history = out.str();
    const auto known = entity_texts(s.train);
    *report = evaluate(*model, s.test, &known).to_json().dump();
  };
  std::string h1, h2, r1, r2;
  run(&h1, &r1);
  run(&h2, &r2);
  return {!h1.empty() && h1 == h2 && r1 == r2,
          std::string("history ") + (h1 == h2 ? "identical" : "DIFFERS") + " (" +
              std::to_string(h1.size()) + " bytes), report " +
              (r1 == r2 ? "identical" : "DIFFERS")};
}

// 11. BILUO round trip

Outcome biluo_round_trip() {
  Rng rng(77);
  const std::vector<std::string> labels = {"PER", "LOC", "ORG", "MISC"};
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int n = static_cast<int>(rng.below(20));
    std::vector<EntitySpan> spans;
    int pos = 0;
    while (pos < n) {
      pos += static_cast<int>(rng.below(3));
      if (pos >= n) break;
      const int end = pos + 1 + static_cast<int>(rng.below(std::min(4, n - pos)));
      spans.push_back(EntitySpan{pos, end, labels[rng.below(labels.size())]});
      pos = end;
    }
    const auto tags = biluo_encode(n, spans);
    if (biluo_decode(tags) != spans) ++failures;
  }
  const std::vector<std::vector<std::string>> malformed = {
      {"I-PER"},           {"L-PER"},          {"B-PER"},          {"B-PER", "O"},
      {"B-PER", "L-LOC"},  {"B-PER", "U-PER"}, {"U-"},             {"X-PER"},
      {"B-PER", "I-LOC"},  {"O", "I-PER", "L-PER"}, {"PER"},
  };
  int accepted = 0;
  for (const auto& tags : malformed) {
    try {
      biluo_decode(tags);
      ++accepted;
    } catch (const ValidationError&) {
    }
  }
  return {failures == 0 && accepted == 0,
          "10000 span sets, " + std::to_string(failures) + " round-trip failures; " +
              std::to_string(malformed.size() - accepted) + "/" +
              std::to_string(malformed.size()) + " malformed sequences rejected"};
}

// 12. Unseen evaluation

Document make_doc(const std::string& text, std::vector<EntitySpan> entities) {
  Document d;
  d.id = text;
  std::istringstream in(text);
  for (std::string w; in >> w;) d.tokens.push_back(w);
  d.entities = std::move(entities);
  return d;
}

Outcome unseen_evaluation() {
  const Corpus train_c = {make_doc("Anna Berg lives in Oslo", {{0, 2, "PER"}, {4, 5, "LOC"}}),
                          make_doc("Acme is big", {{0, 1, "ORG"}})};
  const Corpus gold = {
      make_doc("Anna Berg visited Oslo", {{0, 2, "PER"}, {3, 4, "LOC"}}),
      make_doc("Carl Dahl met Anna Berg", {{0, 2, "PER"}, {3, 5, "PER"}}),
      make_doc("Bergen and Oslo", {{0, 1, "LOC"}, {2, 3, "LOC"}}),
      make_doc("Acme hired Eve", {{0, 1, "ORG"}, {2, 3, "PER"}}),
      make_doc("nothing here", {}),
  };
  const std::vector<std::vector<EntitySpan>> predicted = {
      {{0, 2, "PER"}, {3, 4, "ORG"}},
      {{0, 2, "PER"}, {3, 5, "PER"}},
      {{0, 1, "LOC"}},
      {{0, 1, "ORG"}, {1, 2, "PER"}, {2, 3, "LOC"}},
      {{0, 1, "PER"}},
  };
  const auto known = entity_texts(train_c);
  const EvalReport r = score_corpus(gold, predicted, &known);
  // Seen: TP Anna Berg x2, Acme; FP Oslo/ORG; FN Oslo/LOC x2.
  // Unseen: TP Carl Dahl, Bergen; FP hired, Eve/LOC, nothing; FN Eve/PER.
  auto counts = [](const Prf& p, size_t tp, size_t fp, size_t fn) {
    return p.tp == tp && p.fp == fp && p.fn == fn;
  };
  const bool flags_ok =
      unseen_partition(train_c, gold) ==
      std::vector<std::vector<bool>>{{true, true}, {false, true}, {false, true}, {true, false},
                                     {}};
  const bool ok = flags_ok && r.seen && r.unseen && counts(*r.seen, 3, 1, 2) &&
                  counts(*r.unseen, 2, 3, 1) && counts(r.micro, 5, 4, 3) &&
                  std::abs(r.seen->f1 - 2.0 / 3.0) < 1e-12 &&
                  std::abs(r.unseen->f1 - 0.5) < 1e-12 &&
                  std::abs(r.micro.f1 - 10.0 / 17.0) < 1e-12;
  return {ok, "seen F1 " + fmt("%.6f", r.seen ? r.seen->f1 : -1) + " (expected 2/3), unseen F1 " +
                  fmt("%.6f", r.unseen ? r.unseen->f1 : -1) + " (expected 1/2), overall " +
                  fmt("%.6f", r.micro.f1) + " (expected 10/17)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (exhaustive, length <= 6)", oracle_equivalence},
      {"gold-path completeness", gold_path},
      {"gradient checks (float64)", gradient_checks},
      {"collision math", collision_math},
      {"synthetic convergence", convergence},
      {"hash vs lookup parity", hash_vs_lookup},
      {"row-reduction robustness", row_reduction},
      {"feature ablation harness", ablation},
      {"hash-count sweep", hash_count},
      {"determinism", determinism},
      {"BILUO round trip", biluo_round_trip},
      {"unseen evaluation fixture", unseen_evaluation},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
