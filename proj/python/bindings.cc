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

// pybind11 module `hashner._hashner`. Structured results cross the boundary
// as JSON text; the Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "hashner/collision.h"
#include "hashner/config.h"
#include "hashner/data.h"
#include "hashner/errors.h"
#include "hashner/evaluate.h"
#include "hashner/features.h"
#include "hashner/hashing.h"
#include "hashner/serialize.h"
#include "hashner/synthetic.h"
#include "hashner/train.h"
#include "hashner/transition.h"

namespace py = pybind11;
using namespace hashner;

namespace {

using SpanTuple = std::tuple<int, int, std::string>;

std::vector<SpanTuple> to_tuples(const std::vector<EntitySpan>& spans) {
  std::vector<SpanTuple> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end, s.label);
  return out;
}

std::vector<EntitySpan> from_tuples(const std::vector<SpanTuple>& spans) {
  std::vector<EntitySpan> out;
  for (const auto& [s, e, l] : spans) out.push_back(EntitySpan{s, e, l});
  return out;
}

// Documents travel as JSON lines text in the corpus file format.
Corpus corpus_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in, "<python>");
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  write_jsonl(out, corpus);
  return out.str();
}

TagScheme scheme_of(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) throw ValidationError("unknown tag scheme: " + name);
  return *s;
}

class Model {
 public:
  explicit Model(LoadedModel loaded) : loaded_(std::move(loaded)) {}

  static Model load(const std::string& dir) { return Model(load_model(dir)); }

  static Model train_from_config(const std::string& config_path,
                                 std::optional<std::string> train_path,
                                 std::optional<std::string> dev_path,
                                 std::optional<uint64_t> seed, std::optional<int> max_steps) {
    PipelineConfig cfg = parse_config(config_path);
    if (train_path) cfg.paths.train = *train_path;
    if (dev_path) cfg.paths.dev = *dev_path;
    if (seed) cfg.training.seed = *seed;
    if (max_steps) cfg.training.max_steps = *max_steps;
    cfg.validate();
    const Corpus train_c = read_corpus(cfg.paths.train);
    const Corpus dev_c = read_corpus(cfg.paths.dev);
    std::shared_ptr<const StaticVectorTable> vectors;
    if (cfg.model.embed.include_static_vectors) {
      vectors = std::make_shared<StaticVectorTable>(
          load_static_vectors(cfg.model.embed.static_vectors_path));
    }
    LoadedModel loaded;
    loaded.model = build_model<float>(cfg.model, train_c, vectors, cfg.training.seed);
    std::ostringstream history;
    TrainHooks hooks;
    hooks.history = &history;
    {
      py::gil_scoped_release release;
      hashner::train(*loaded.model, train_c, dev_c, cfg.training, hooks);
    }
    cfg.model = loaded.model->config();
    loaded.config = cfg;
    Model m(std::move(loaded));
    m.history_ = history.str();
    return m;
  }

  void save(const std::string& dir) { save_model(dir, *loaded_.model, loaded_.config); }

  std::vector<std::vector<SpanTuple>> predict(
      const std::vector<std::vector<std::string>>& sentences) const {
    Corpus docs;
    for (const auto& tokens : sentences) {
      Document d;
      d.tokens = tokens;
      docs.push_back(std::move(d));
    }
    std::vector<std::vector<EntitySpan>> spans;
    {
      py::gil_scoped_release release;
      spans = hashner::predict(*loaded_.model, docs);
    }
    std::vector<std::vector<SpanTuple>> out;
    for (const auto& s : spans) out.push_back(to_tuples(s));
    return out;
  }

  std::string evaluate(const std::string& docs_jsonl,
                       std::optional<std::string> train_jsonl) const {
    const Corpus docs = corpus_from_jsonl(docs_jsonl);
    std::unordered_set<std::string> known;
    if (train_jsonl) known = entity_texts(corpus_from_jsonl(*train_jsonl));
    py::gil_scoped_release release;
    return hashner::evaluate(*loaded_.model, docs, train_jsonl ? &known : nullptr)
        .to_json()
        .dump();
  }

  std::vector<std::string> labels() const { return loaded_.model->config().ner.labels; }
  size_t parameter_count() const { return loaded_.model->parameter_count(); }
  std::string config() const { return emit_config(loaded_.config); }
  const std::string& history() const { return history_; }

 private:
  LoadedModel loaded_;
  std::string history_;
};

}  // namespace

PYBIND11_MODULE(_hashner, m) {
  m.doc() = "Hash-embedding transition-based NER";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);

  m.def("murmurhash3_x64_128", [](const std::string& key, uint32_t seed) {
    const auto h = murmurhash3_x64_128(key, seed);
    return std::make_tuple(h[0], h[1]);
  }, py::arg("key"), py::arg("seed") = 0);
  m.def("bucket_indices", [](const std::string& symbol, uint64_t rows, int k) {
    return bucket_indices(symbol, HashSpec(rows, k));
  }, py::arg("symbol"), py::arg("rows"), py::arg("k") = 4);

  m.def("extract_features", [](const std::string& token) {
    const auto f = extract_features(token);
    return std::map<std::string, std::string>{{"ORTH", f.orth},
                                              {"NORM", f.norm},
                                              {"PREFIX", f.prefix},
                                              {"SUFFIX", f.suffix},
                                              {"SHAPE", f.shape}};
  }, py::arg("token"));

  m.def("biluo_encode", [](int length, const std::vector<SpanTuple>& spans) {
    const auto s = from_tuples(spans);
    return biluo_encode(length, s);
  }, py::arg("length"), py::arg("spans"));
  m.def("biluo_decode", [](const std::vector<std::string>& tags) {
    return to_tuples(biluo_decode(tags));
  }, py::arg("tags"));

  m.def("read_corpus", [](const std::string& path, const std::string& scheme) {
    return corpus_to_jsonl(read_corpus(path, scheme_of(scheme)));
  }, py::arg("path"), py::arg("scheme") = "auto");
  m.def("write_corpus", [](const std::string& path, const std::string& docs_jsonl) {
    write_corpus(path, corpus_from_jsonl(docs_jsonl));
  }, py::arg("path"), py::arg("docs_jsonl"));
  m.def("generate_synthetic", [](int sentences, uint64_t seed) {
    SyntheticConfig c;
    c.sentences = sentences;
    c.seed = seed;
    return corpus_to_jsonl(generate_synthetic(c));
  }, py::arg("sentences") = 5000, py::arg("seed") = 0);

  m.def("score", [](const std::string& gold_jsonl,
                    const std::vector<std::vector<SpanTuple>>& predicted,
                    std::optional<std::string> train_jsonl) {
    const Corpus gold = corpus_from_jsonl(gold_jsonl);
    std::vector<std::vector<EntitySpan>> pred;
    for (const auto& p : predicted) pred.push_back(from_tuples(p));
    std::unordered_set<std::string> known;
    if (train_jsonl) known = entity_texts(corpus_from_jsonl(*train_jsonl));
    return score_corpus(gold, pred, train_jsonl ? &known : nullptr).to_json().dump();
  }, py::arg("gold_jsonl"), py::arg("predicted"), py::arg("train_jsonl") = py::none());

  m.def("collision_probability", &collision_probability, py::arg("n"), py::arg("vocab_size"));
  m.def("expected_collisions", &expected_collisions, py::arg("n"), py::arg("vocab_size"));
  m.def("signature_collision_probability", &signature_collision_probability, py::arg("n"),
        py::arg("k"), py::arg("vocab_size"));
  m.def("simulate_collisions", [](uint64_t n, int k, uint64_t vocab, int trials, uint64_t seed) {
    py::gil_scoped_release release;
    return simulate_collisions(n, k, vocab, trials, seed).to_json().dump();
  }, py::arg("n"), py::arg("k"), py::arg("vocab_size"), py::arg("trials"), py::arg("seed") = 0);
  m.def("collision_report", [](uint64_t n, int k, uint64_t vocab, int trials, uint64_t seed) {
    py::gil_scoped_release release;
    return collision_report(n, k, vocab, trials, seed).to_json().dump();
  }, py::arg("n"), py::arg("k"), py::arg("vocab_size"), py::arg("trials") = 0,
     py::arg("seed") = 0);

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::load, py::arg("directory"))
      .def_static("train", &Model::train_from_config, py::arg("config"),
                  py::arg("train") = py::none(), py::arg("dev") = py::none(),
                  py::arg("seed") = py::none(), py::arg("max_steps") = py::none())
      .def("save", &Model::save, py::arg("directory"))
      .def("predict", &Model::predict, py::arg("sentences"))
      .def("evaluate_jsonl", &Model::evaluate, py::arg("docs_jsonl"),
           py::arg("train_jsonl") = py::none())
      .def_property_readonly("labels", &Model::labels)
      .def_property_readonly("parameter_count", &Model::parameter_count)
      .def_property_readonly("config_toml", &Model::config)
      .def_property_readonly("history_jsonl", &Model::history);
}
