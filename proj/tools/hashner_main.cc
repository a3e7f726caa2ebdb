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

// hashner command line: train, evaluate, predict, debug-data, collision,
// synth and sweep. Reports go to stdout as JSON, logs to stderr.
//
// Exit codes: 0 success, 1 validation error (bad flags, config, corpus or
// model directory), 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hashner/collision.h"
#include "hashner/config.h"
#include "hashner/data.h"
#include "hashner/errors.h"
#include "hashner/experiments.h"
#include "hashner/serialize.h"
#include "hashner/synthetic.h"
#include "hashner/train.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hashner {
namespace {

constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

void log(const std::string& msg) { std::cerr << "[hashner] " << msg << '\n' << std::flush; }

void emit(const json& j) { std::cout << j.dump(2) << '\n' << std::flush; }

TagScheme scheme_from(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) throw ValidationError("--scheme: expected auto, iob1, iob2 or biluo");
  return *s;
}

Corpus load_corpus(const std::string& path, const std::string& what, TagScheme scheme) {
  if (path.empty()) throw ValidationError(what + ": no corpus path given");
  if (!fs::is_regular_file(path)) throw ValidationError(what + ": file not found: " + path);
  Corpus c = read_corpus(path, scheme);
  log("read " + std::to_string(c.size()) + " documents from " + path);
  return c;
}

std::shared_ptr<const StaticVectorTable> load_vectors(const MultiEmbedConfig& embed) {
  if (!embed.include_static_vectors) return nullptr;
  if (!fs::is_regular_file(embed.static_vectors_path)) {
    throw ValidationError("embed.static_vectors: file not found: " + embed.static_vectors_path);
  }
  return std::make_shared<StaticVectorTable>(load_static_vectors(embed.static_vectors_path));
}

PipelineConfig read_pipeline(const std::string& path) {
  if (!fs::is_regular_file(path)) throw ValidationError("--config: file not found: " + path);
  return parse_config(path);
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--seeds: expected comma-separated integers, got \"" + text + "\"");
    }
  }
  if (seeds.empty()) throw ValidationError("--seeds: at least one seed");
  return seeds;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string output;
  std::string train;
  std::string dev;
  std::string scheme = "auto";
  std::optional<uint64_t> seed;
  std::optional<int> max_steps;
};

int cmd_train(const TrainArgs& a) {
  PipelineConfig cfg = read_pipeline(a.config);
  if (!a.train.empty()) cfg.paths.train = a.train;
  if (!a.dev.empty()) cfg.paths.dev = a.dev;
  if (!a.output.empty()) cfg.paths.output = a.output;
  if (a.seed) cfg.training.seed = *a.seed;
  if (a.max_steps) cfg.training.max_steps = *a.max_steps;
  cfg.validate();
  if (cfg.paths.output.empty()) throw ValidationError("paths.output: no output directory");

  const TagScheme scheme = scheme_from(a.scheme);
  const Corpus train_c = load_corpus(cfg.paths.train, "paths.train", scheme);
  const Corpus dev_c = load_corpus(cfg.paths.dev, "paths.dev", scheme);
  auto model = build_model<float>(cfg.model, train_c, load_vectors(cfg.model.embed),
                                  cfg.training.seed);
  log("model: " + std::to_string(model->parameter_count()) + " parameters, labels " +
      json(model->config().ner.labels).dump());

  fs::create_directories(cfg.paths.output);
  const fs::path out(cfg.paths.output);
  std::ofstream history(out / "history.jsonl");
  if (!history) throw IoError("cannot write " + (out / "history.jsonl").string());
  TrainHooks hooks;
  hooks.history = &history;
  hooks.log = &std::cerr;
  const TrainResult result = train(*model, train_c, dev_c, cfg.training, hooks);
  save_model(cfg.paths.output, *model, cfg);
  const EvalReport dev = evaluate(*model, dev_c);
  std::ofstream(out / "dev_report.json") << dev.to_json().dump(2) << '\n';
  log("saved model to " + cfg.paths.output);

  emit({{"output", cfg.paths.output},
        {"steps", result.steps},
        {"best_step", result.best_step},
        {"best_dev_f1", result.best_f1},
        {"early_stopped", result.early_stopped},
        {"dev", dev.to_json()}});
  return 0;
}

// ---------------------------------------------------------------------------

LoadedModel open_model(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("--model: directory not found: " + dir);
  try {
    return load_model(dir);
  } catch (const IoError& e) {
    throw ValidationError(std::string("--model: ") + e.what());
  }
}

int cmd_evaluate(const std::string& model_dir, const std::string& corpus_path,
                 const std::string& train_path, const std::string& scheme_name) {
  const TagScheme scheme = scheme_from(scheme_name);
  const LoadedModel loaded = open_model(model_dir);
  const Corpus corpus = load_corpus(corpus_path, "--corpus", scheme);
  std::unordered_set<std::string> known;
  if (!train_path.empty()) known = entity_texts(load_corpus(train_path, "--train-corpus", scheme));
  const EvalReport report =
      evaluate(*loaded.model, corpus, train_path.empty() ? nullptr : &known);
  emit(report.to_json());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_predict(const std::string& model_dir, const std::string& input,
                const std::string& output) {
  const LoadedModel loaded = open_model(model_dir);
  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (input != "-") {
    file_in.open(input);
    if (!file_in) throw ValidationError("--input: cannot open " + input);
    in = &file_in;
  }
  Corpus docs;
  std::string line;
  int line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    Document d;
    d.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                   : std::to_string(line_no);
    if (j.contains("tokens") && j["tokens"].is_array()) {
      for (const auto& t : j["tokens"]) {
        if (!t.is_string()) throw ParseError("tokens must be strings", line_no);
        d.tokens.push_back(t.get<std::string>());
      }
    } else if (j.contains("text") && j["text"].is_string()) {
      std::istringstream words(j["text"].get<std::string>());
      for (std::string w; words >> w;) d.tokens.push_back(w);
    } else {
      throw ParseError("expected \"tokens\" (array) or \"text\" (string)", line_no);
    }
    docs.push_back(std::move(d));
  }
  const auto predicted = predict(*loaded.model, docs);
  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (output != "-") {
    file_out.open(output);
    if (!file_out) throw IoError("cannot write " + output);
    out = &file_out;
  }
  for (size_t i = 0; i < docs.size(); ++i) {
    json ents = json::array();
    for (const auto& e : predicted[i]) ents.push_back({e.start, e.end, e.label});
    *out << json{{"id", docs[i].id}, {"tokens", docs[i].tokens}, {"entities", ents}}.dump()
         << '\n';
  }
  out->flush();
  log("predicted " + std::to_string(docs.size()) + " documents");
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_debug_data(const std::string& path, const std::string& vectors_path,
                   const std::string& scheme_name) {
  const TagScheme scheme = scheme_from(scheme_name);
  if (!fs::is_regular_file(path)) throw ValidationError("--corpus: file not found: " + path);
  std::vector<Problem> problems;
  const Corpus corpus = read_corpus(path, scheme, &problems);
  std::unique_ptr<StaticVectorTable> vectors;
  if (!vectors_path.empty()) {
    vectors = std::make_unique<StaticVectorTable>(load_static_vectors(vectors_path));
  }
  const DatasetStats s = dataset_stats(corpus, vectors.get());
  json stats = {{"documents", s.documents},
                {"tokens", s.tokens},
                {"entities", s.entities},
                {"entities_per_document", s.entities_per_document},
                {"document_length", s.document_length},
                {"entity_length", s.entity_length},
                {"vocabulary", s.vocabulary},
                {"unknown_to_static", s.unknown_to_static ? json(*s.unknown_to_static)
                                                          : json(nullptr)},
                {"labels", s.label_counts}};
  json features = json::object();
  for (const auto& [f, n] : feature_count_report(corpus)) features[std::string(feature_name(f))] = n;
  json issues = json::array();
  for (const auto& p : problems) {
    issues.push_back({{"document", p.document}, {"line", p.line}, {"message", p.message}});
  }
  emit({{"corpus", path}, {"stats", stats}, {"unique_features", features}, {"problems", issues}});
  log(std::to_string(problems.size()) + " problem(s) found");
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_collision(int64_t n, int k, int64_t vocab, int trials, uint64_t seed) {
  if (n < 1) throw ValidationError("--n: must be >= 1");
  if (vocab < 1) throw ValidationError("--vocab: must be >= 1");
  emit(collision_report(static_cast<uint64_t>(n), k, static_cast<uint64_t>(vocab), trials, seed)
           .to_json());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_synth(const SyntheticConfig& sc, const std::string& output, const std::string& split_dir,
              uint64_t split_seed) {
  const Corpus corpus = generate_synthetic(sc);
  if (!split_dir.empty()) {
    fs::create_directories(split_dir);
    const Split s = random_split(corpus, {0.8, 0.1, 0.1}, split_seed);
    const fs::path d(split_dir);
    write_corpus((d / "train.jsonl").string(), s.train);
    write_corpus((d / "dev.jsonl").string(), s.dev);
    write_corpus((d / "test.jsonl").string(), s.test);
    emit({{"train", s.train.size()}, {"dev", s.dev.size()}, {"test", s.test.size()},
          {"directory", split_dir}});
    return 0;
  }
  if (output.empty() || output == "-") {
    write_jsonl(std::cout, corpus);
  } else {
    write_corpus(output, corpus);
    emit({{"documents", corpus.size()}, {"output", output}});
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const std::string& config_path, const std::string& kind,
              const std::string& seeds_text, const std::vector<double>& fractions,
              const std::string& scheme_name) {
  const PipelineConfig cfg = read_pipeline(config_path);
  const TagScheme scheme = scheme_from(scheme_name);
  const auto seeds = parse_seeds(seeds_text);
  ExperimentData data;
  data.train = load_corpus(cfg.paths.train, "paths.train", scheme);
  data.dev = load_corpus(cfg.paths.dev, "paths.dev", scheme);
  data.eval = cfg.paths.test.empty() ? data.dev : load_corpus(cfg.paths.test, "paths.test", scheme);

  std::vector<Variant> variants;
  if (kind == "ablation") {
    variants = ablation_variants(cfg.model);
  } else if (kind == "hash-count") {
    variants = hash_count_variants(cfg.model);
  } else if (kind == "rows") {
    variants = row_fraction_variants(cfg.model, data.train, fractions);
  } else if (kind == "embed") {
    variants = embed_comparison_variants(cfg.model, data.train);
  } else {
    throw ValidationError("--kind: expected ablation, hash-count, rows or embed");
  }
  const auto results =
      run_variants(variants, data, cfg.training, seeds, load_vectors(cfg.model.embed), &std::cerr);
  const Table table = results_table(results);
  const Table relative = relative_error_table(results);
  std::cerr << table.to_markdown() << '\n' << relative.to_markdown();
  json runs = json::object();
  for (const auto& r : results) runs[r.name] = r.result.to_json();
  emit({{"kind", kind},
        {"seeds", seeds},
        {"results", table.to_json()},
        {"relative_error_increase", relative.to_json()},
        {"markdown", table.to_markdown() + "\n" + relative.to_markdown()},
        {"runs", runs}});
  return 0;
}

}  // namespace
}  // namespace hashner

int main(int argc, char** argv) {
  using namespace hashner;
  CLI::App app{"Transition-based NER with hashed multi-feature embeddings"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model from a TOML config");
  train->add_option("--config,-c", train_args.config, "Config file")->required();
  train->add_option("--output,-o", train_args.output, "Model directory (overrides paths.output)");
  train->add_option("--train", train_args.train, "Training corpus (overrides paths.train)");
  train->add_option("--dev", train_args.dev, "Development corpus (overrides paths.dev)");
  train->add_option("--seed", train_args.seed, "Overrides training.seed");
  train->add_option("--max-steps", train_args.max_steps, "Overrides training.max_steps");
  train->add_option("--scheme", train_args.scheme, "Tag scheme of CoNLL input")
      ->capture_default_str();

  std::string model_dir, corpus, train_corpus, scheme = "auto";
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a corpus");
  evaluate->add_option("--model,-m", model_dir, "Model directory")->required();
  evaluate->add_option("--corpus", corpus, "Gold corpus")->required();
  evaluate->add_option("--train-corpus", train_corpus,
                       "Training corpus; adds seen/unseen scores");
  evaluate->add_option("--scheme", scheme, "Tag scheme of CoNLL input")->capture_default_str();

  std::string input = "-", output = "-";
  auto* predict_cmd = app.add_subcommand("predict", "Tag JSON lines ({\"tokens\": [...]})");
  predict_cmd->add_option("--model,-m", model_dir, "Model directory")->required();
  predict_cmd->add_option("--input,-i", input, "Input file or - for stdin")
      ->capture_default_str();
  predict_cmd->add_option("--output,-o", output, "Output file or - for stdout")
      ->capture_default_str();

  std::string vectors;
  auto* debug = app.add_subcommand("debug-data", "Corpus statistics and annotation problems");
  debug->add_option("--corpus", corpus, "Corpus file")->required();
  debug->add_option("--static-vectors", vectors, "Static vector table for unknown counts");
  debug->add_option("--scheme", scheme, "Tag scheme of CoNLL input")->capture_default_str();

  int64_t n = 5000, vocab = 50000;
  int k = 4, trials = 10;
  uint64_t seed = 0;
  auto* collision = app.add_subcommand("collision", "Hash collision analytics");
  collision->add_option("--n", n, "Rows per table")->capture_default_str();
  collision->add_option("--k", k, "Hash functions")->capture_default_str();
  collision->add_option("--vocab", vocab, "Vocabulary size")->capture_default_str();
  collision->add_option("--trials", trials, "Simulation trials; 0 for analytic only")
      ->capture_default_str();
  collision->add_option("--seed", seed, "Simulation seed")->capture_default_str();

  SyntheticConfig synth_cfg;
  std::string split_dir;
  uint64_t split_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic shape-determined corpus");
  synth->add_option("--sentences", synth_cfg.sentences)->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed)->capture_default_str();
  synth->add_option("--output,-o", output, "Corpus file (.jsonl or CoNLL) or - for stdout");
  synth->add_option("--split-dir", split_dir, "Write train/dev/test.jsonl (80/10/10) here");
  synth->add_option("--split-seed", split_seed)->capture_default_str();

  std::string config_path, kind, seeds = "1,2,3";
  std::vector<double> fractions = {0.1, 0.25, 0.5, 1.0};
  auto* sweep = app.add_subcommand("sweep", "Multi-seed experiment grids");
  sweep->add_option("--config,-c", config_path, "Base config")->required();
  sweep->add_option("--kind", kind, "ablation, hash-count, rows or embed")->required();
  sweep->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
  sweep->add_option("--fractions", fractions, "Row fractions for --kind rows")
      ->capture_default_str();
  sweep->add_option("--scheme", scheme, "Tag scheme of CoNLL input")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    if (*train) return cmd_train(train_args);
    if (*evaluate) return cmd_evaluate(model_dir, corpus, train_corpus, scheme);
    if (*predict_cmd) return cmd_predict(model_dir, input, output);
    if (*debug) return cmd_debug_data(corpus, vectors, scheme);
    if (*collision) return cmd_collision(n, k, vocab, trials, seed);
    if (*synth) return cmd_synth(synth_cfg, output, split_dir, split_seed);
    if (*sweep) return cmd_sweep(config_path, kind, seeds, fractions, scheme);
  } catch (const std::invalid_argument& e) {
    // ValidationError, ConfigError and ParseError.
    log(std::string("error: ") + e.what());
    return kValidationError;
  } catch (const std::exception& e) {
    log(std::string("failure: ") + e.what());
    return kRuntimeError;
  }
  return kRuntimeError;
}
