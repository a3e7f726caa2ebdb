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

#include "hashner/config.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hashner/errors.h"
#include "toml.hpp"

namespace hashner {
namespace {

namespace fs = std::filesystem;

class Section {
 public:
  Section(const toml::table* table, std::string name,
          std::initializer_list<const char*> allowed)
      : table_(table), name_(std::move(name)) {
    if (!table_) return;
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, node] : *table_) {
      if (!keys.count(std::string(key.str()))) {
        throw ConfigError(qualified(key.str()) + ": unknown key");
      }
    }
  }

  bool has(std::string_view key) const { return table_ && table_->contains(key); }
  const toml::node* node(std::string_view key) const {
    return table_ ? table_->get(key) : nullptr;
  }
  std::string qualified(std::string_view key) const { return name_ + "." + std::string(key); }

  void read(std::string_view key, int& out) const {
    int64_t v = out;
    read_int64(key, v);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ConfigError(qualified(key) + ": out of range");
    }
    out = static_cast<int>(v);
  }
  void read(std::string_view key, uint64_t& out) const {
    int64_t v = static_cast<int64_t>(out);
    if (!has(key)) return;
    read_int64(key, v);
    if (v < 0) throw ConfigError(qualified(key) + ": must be >= 0");
    out = static_cast<uint64_t>(v);
  }
  void read(std::string_view key, double& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (n->is_integer()) {
      out = static_cast<double>(**n->as_integer());
    } else if (n->is_floating_point()) {
      out = **n->as_floating_point();
    } else {
      throw ConfigError(qualified(key) + ": expected a number");
    }
  }
  void read(std::string_view key, bool& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_boolean()) throw ConfigError(qualified(key) + ": expected true or false");
    out = **n->as_boolean();
  }
  void read(std::string_view key, std::string& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_string()) throw ConfigError(qualified(key) + ": expected a string");
    out = **n->as_string();
  }
  void read(std::string_view key, std::vector<std::string>& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(qualified(key) + ": expected an array of strings");
    out.clear();
    for (const auto& item : *a) {
      if (!item.is_string()) throw ConfigError(qualified(key) + ": expected an array of strings");
      out.push_back(**item.as_string());
    }
  }

 private:
  void read_int64(std::string_view key, int64_t& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_integer()) throw ConfigError(qualified(key) + ": expected an integer");
    out = **n->as_integer();
  }

  const toml::table* table_;
  std::string name_;
};

const toml::table* subtable(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(std::string(name) + ": expected a table");
  return n->as_table();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

EmbedStrategy parse_strategy(const std::string& s) {
  if (s == "hash") return EmbedStrategy::kHash;
  if (s == "lookup") return EmbedStrategy::kLookup;
  throw ConfigError("embed.strategy: expected \"hash\" or \"lookup\", got \"" + s + "\"");
}

}  // namespace

void PipelineConfig::validate() const {
  ModelConfig m = model;
  // Labels may come from the training corpus.
  if (m.ner.labels.empty()) m.ner.labels = {"-"};
  m.validate();
  training.validate();
  if (training.seed > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
    throw ConfigError("training.seed: must be < 2^63");
  }
}

PipelineConfig parse_config_string(const std::string& text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("config line " + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
  for (const auto& [key, node] : root) {
    static const std::set<std::string> sections = {"embed", "encoder", "ner", "training",
                                                   "paths"};
    if (!sections.count(std::string(key.str()))) {
      throw ConfigError(std::string(key.str()) + ": unknown section");
    }
  }

  PipelineConfig c;
  MultiEmbedConfig& e = c.model.embed;
  const toml::table* embed_table = subtable(root, "embed");
  const Section embed(embed_table, "embed",
                      {"strategy", "width", "features", "rows", "hash_count", "min_frequency",
                       "maxout_pieces", "include_static_vectors", "static_vectors"});
  std::string strategy = "hash";
  embed.read("strategy", strategy);
  e.strategy = parse_strategy(strategy);
  embed.read("width", e.width);
  std::vector<std::string> features;
  embed.read("features", features);
  if (embed.has("features")) {
    e.features.clear();
    for (const auto& name : features) {
      const auto f = parse_feature(name);
      if (!f) throw ConfigError("embed.features: unknown feature \"" + name + "\"");
      e.features.push_back(*f);
    }
  }
  embed.read("maxout_pieces", e.maxout_pieces);
  embed.read("include_static_vectors", e.include_static_vectors);
  embed.read("static_vectors", e.static_vectors_path);
  e.static_vectors_path = resolve(e.static_vectors_path, base_dir);
  if (e.strategy == EmbedStrategy::kHash) {
    if (embed.has("min_frequency")) {
      throw ConfigError("embed.min_frequency: only valid with strategy = \"lookup\"");
    }
    embed.read("hash_count", e.hash_count);
    if (embed.has("rows")) {
      const toml::table* rows = embed.node("rows")->as_table();
      if (!rows) throw ConfigError("embed.rows: expected a table");
      for (const auto& [key, node] : *rows) {
        const std::string name(key.str());
        const auto f = parse_feature(name);
        if (!f) throw ConfigError("embed.rows." + name + ": unknown feature");
        if (!node.is_integer() || **node.as_integer() < 1) {
          throw ConfigError("embed.rows." + name + ": expected a positive integer");
        }
        e.rows[*f] = static_cast<uint64_t>(**node.as_integer());
      }
    }
    std::map<Feature, uint64_t> resolved;
    for (Feature f : e.features) resolved[f] = e.rows_for(f);
    e.rows = std::move(resolved);
  } else {
    if (embed.has("rows")) throw ConfigError("embed.rows: only valid with strategy = \"hash\"");
    if (embed.has("hash_count")) {
      throw ConfigError("embed.hash_count: only valid with strategy = \"hash\"");
    }
    embed.read("min_frequency", e.min_frequency);
  }

  const Section encoder(subtable(root, "encoder"), "encoder",
                        {"depth", "window", "width", "maxout_pieces"});
  encoder.read("depth", c.model.encoder.depth);
  encoder.read("window", c.model.encoder.window);
  encoder.read("width", c.model.encoder.width);
  encoder.read("maxout_pieces", c.model.encoder.maxout_pieces);

  const Section ner(subtable(root, "ner"), "ner",
                    {"labels", "state_tokens", "hidden_width", "maxout_pieces"});
  ner.read("labels", c.model.ner.labels);
  ner.read("state_tokens", c.model.ner.state_tokens);
  ner.read("hidden_width", c.model.ner.hidden_width);
  ner.read("maxout_pieces", c.model.ner.maxout_pieces);

  TrainConfig& t = c.training;
  const Section training(subtable(root, "training"), "training",
                         {"max_steps", "patience", "eval_frequency", "batch_words",
                          "learning_rate", "beta1", "beta2", "weight_decay", "grad_clip",
                          "dropout", "seed"});
  training.read("max_steps", t.max_steps);
  training.read("patience", t.patience);
  training.read("eval_frequency", t.eval_frequency);
  training.read("batch_words", t.batch_words);
  training.read("learning_rate", t.learning_rate);
  training.read("beta1", t.beta1);
  training.read("beta2", t.beta2);
  training.read("weight_decay", t.weight_decay);
  training.read("grad_clip", t.grad_clip);
  training.read("dropout", t.dropout);
  training.read("seed", t.seed);

  const Section paths(subtable(root, "paths"), "paths", {"train", "dev", "test", "output"});
  paths.read("train", c.paths.train);
  paths.read("dev", c.paths.dev);
  paths.read("test", c.paths.test);
  paths.read("output", c.paths.output);
  for (auto* p : {&c.paths.train, &c.paths.dev, &c.paths.test, &c.paths.output}) {
    *p = resolve(*p, base_dir);
  }

  c.validate();
  return c;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  return parse_config_string(buf.str(), base.string());
}

std::string emit_config(const PipelineConfig& c) {
  const MultiEmbedConfig& e = c.model.embed;
  toml::array features;
  for (Feature f : e.features) features.push_back(std::string(feature_name(f)));
  toml::table embed{{"strategy", e.strategy == EmbedStrategy::kHash ? "hash" : "lookup"},
                    {"width", e.width},
                    {"features", features},
                    {"maxout_pieces", e.maxout_pieces},
                    {"include_static_vectors", e.include_static_vectors},
                    {"static_vectors", e.static_vectors_path}};
  if (e.strategy == EmbedStrategy::kHash) {
    embed.insert("hash_count", e.hash_count);
    toml::table rows;
    for (Feature f : e.features) {
      rows.insert(feature_name(f), static_cast<int64_t>(e.rows_for(f)));
    }
    embed.insert("rows", rows);
  } else {
    embed.insert("min_frequency", e.min_frequency);
  }

  const EncoderConfig& enc = c.model.encoder;
  toml::array labels;
  for (const auto& l : c.model.ner.labels) labels.push_back(l);
  const TrainConfig& t = c.training;
  toml::table root{
      {"embed", embed},
      {"encoder",
       toml::table{{"depth", enc.depth},
                   {"window", enc.window},
                   {"width", enc.width},
                   {"maxout_pieces", enc.maxout_pieces}}},
      {"ner", toml::table{{"labels", labels},
                          {"state_tokens", c.model.ner.state_tokens},
                          {"hidden_width", c.model.ner.hidden_width},
                          {"maxout_pieces", c.model.ner.maxout_pieces}}},
      {"training", toml::table{{"max_steps", t.max_steps},
                               {"patience", t.patience},
                               {"eval_frequency", t.eval_frequency},
                               {"batch_words", t.batch_words},
                               {"learning_rate", t.learning_rate},
                               {"beta1", t.beta1},
                               {"beta2", t.beta2},
                               {"weight_decay", t.weight_decay},
                               {"grad_clip", t.grad_clip},
                               {"dropout", t.dropout},
                               {"seed", static_cast<int64_t>(t.seed)}}},
      {"paths", toml::table{{"train", c.paths.train},
                            {"dev", c.paths.dev},
                            {"test", c.paths.test},
                            {"output", c.paths.output}}},
  };
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

void write_config(const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config: " + path);
  out << emit_config(config);
  if (!out) throw IoError("failed writing config: " + path);
}

}  // namespace hashner
