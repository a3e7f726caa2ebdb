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

#include "hashner/experiments.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hashner/errors.h"

namespace hashner {
namespace {

std::string feature_list(const std::vector<Feature>& features) {
  std::string out;
  for (Feature f : features) {
    if (!out.empty()) out += "+";
    out += feature_name(f);
  }
  return out;
}

std::string percent(double v, int precision = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, 100.0 * v);
  return buf;
}

}  // namespace

std::vector<VariantResult> run_variants(std::span<const Variant> variants,
                                        const ExperimentData& data, const TrainConfig& train,
                                        std::span<const uint64_t> seeds,
                                        std::shared_ptr<const StaticVectorTable> vectors,
                                        std::ostream* log) {
  const auto known = entity_texts(data.train);
  std::vector<VariantResult> out;
  for (const auto& variant : variants) {
    auto run = [&](uint64_t seed) {
      TrainConfig config = train;
      config.seed = seed;
      auto model = build_model<float>(variant.model, data.train, vectors, seed);
      SeedRun r;
      r.seed = seed;
      r.training = hashner::train(*model, data.train, data.dev, config, TrainHooks{});
      r.report = evaluate(*model, data.eval, &known);
      if (log) {
        *log << variant.name << " seed " << seed << ": F1 " << percent(r.report.micro.f1)
             << " (" << r.training.steps << " steps, best at " << r.training.best_step
             << ")\n"
             << std::flush;
      }
      return r;
    };
    out.push_back(VariantResult{variant.name, multi_seed_run(seeds, run)});
  }
  return out;
}

std::vector<Variant> ablation_variants(const ModelConfig& base) {
  std::vector<Feature> features = {Feature::kNorm, Feature::kPrefix, Feature::kSuffix,
                                   Feature::kShape};
  std::vector<Variant> out;
  auto add = [&](const std::vector<Feature>& fs) {
    ModelConfig c = base;
    c.embed.features = fs;
    out.push_back(Variant{feature_list(fs), c});
  };
  add(features);
  for (Feature drop : {Feature::kShape, Feature::kSuffix, Feature::kPrefix}) {
    features.erase(std::find(features.begin(), features.end(), drop));
    add(features);
  }
  add({Feature::kOrth});
  return out;
}

std::vector<Variant> hash_count_variants(const ModelConfig& base) {
  std::vector<Variant> out;
  for (int k = 1; k <= HashSpec::kMaxHashes; ++k) {
    ModelConfig c = base;
    c.embed.strategy = EmbedStrategy::kHash;
    c.embed.hash_count = k;
    out.push_back(Variant{"k=" + std::to_string(k), c});
  }
  return out;
}

std::vector<Variant> row_fraction_variants(const ModelConfig& base, const Corpus& train,
                                           std::span<const double> fractions) {
  const auto features = base.embed.ordered_features();
  const auto vocabs = lookup_vocabularies(base.embed, train);
  std::vector<Variant> out;
  for (double f : fractions) {
    ModelConfig c = base;
    c.embed.strategy = EmbedStrategy::kHash;
    c.embed.rows = adjusted_rows(vocabs, features, f);
    out.push_back(Variant{"rows=" + percent(f, 0) + "%", c});
  }
  return out;
}

std::vector<Variant> embed_comparison_variants(const ModelConfig& base, const Corpus& train) {
  std::vector<Variant> out;
  ModelConfig hash = base;
  hash.embed.strategy = EmbedStrategy::kHash;
  out.push_back(Variant{"MultiHashEmbed", hash});
  ModelConfig lookup = base;
  lookup.embed.strategy = EmbedStrategy::kLookup;
  out.push_back(Variant{"MultiEmbed", lookup});
  const double one = 1.0;
  auto adjusted = row_fraction_variants(base, train, std::span<const double>(&one, 1));
  adjusted.front().name = "MultiHashEmbed (adjusted rows)";
  out.push_back(adjusted.front());
  return out;
}

std::string Table::to_markdown() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) out << ' ' << c << " |";
    out << '\n';
  };
  line(headers);
  out << '|';
  for (size_t i = 0; i < headers.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& r : rows) line(r);
  return out.str();
}

nlohmann::json Table::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    for (size_t i = 0; i < headers.size() && i < r.size(); ++i) row[headers[i]] = r[i];
    j.push_back(row);
  }
  return j;
}

Table results_table(std::span<const VariantResult> results) {
  Table t;
  t.headers = {"variant", "F1", "stddev", "seen F1", "unseen F1"};
  for (const auto& r : results) {
    const auto& m = r.result;
    t.rows.push_back({r.name, percent(m.mean_f1), percent(m.stddev_f1),
                      m.mean_seen_f1 ? percent(*m.mean_seen_f1) : "-",
                      m.mean_unseen_f1 ? percent(*m.mean_unseen_f1) : "-"});
  }
  return t;
}

std::string relative_error_increase(double f1, double base_f1) {
  const double err = 1.0 - f1;
  const double base = 1.0 - base_f1;
  if (base <= 0.0) return err <= 0.0 ? "0.0%" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.1f%%", 100.0 * (err - base) / base);
  return buf;
}

Table relative_error_table(std::span<const VariantResult> results, size_t baseline) {
  if (baseline >= results.size()) throw ValidationError("relative_error_table: no baseline");
  const auto& b = results[baseline].result;
  Table t;
  t.headers = {"features", "F1", "all", "seen", "unseen"};
  for (const auto& r : results) {
    const auto& m = r.result;
    auto split = [&](const std::optional<double>& v, const std::optional<double>& base) {
      return v && base ? relative_error_increase(*v, *base) : std::string("-");
    };
    t.rows.push_back({r.name, percent(m.mean_f1), relative_error_increase(m.mean_f1, b.mean_f1),
                      split(m.mean_seen_f1, b.mean_seen_f1),
                      split(m.mean_unseen_f1, b.mean_unseen_f1)});
  }
  return t;
}

}  // namespace hashner
