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

#include "hashner/serialize.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hashner/errors.h"

namespace hashner {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFormat = "hashner-model-1";

uint32_t to_little(uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

std::string vocab_file(Feature f) { return "vocab_" + std::string(feature_name(f)) + ".json"; }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace

template <typename T>
void save_model(const std::string& dir, NerModel<T>& model, PipelineConfig pipeline) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  pipeline.model = model.config();
  // config.toml resolves relative paths against the model directory.
  auto& vectors = pipeline.model.embed.static_vectors_path;
  if (!vectors.empty()) vectors = fs::absolute(vectors).lexically_normal().string();
  for (auto* p : {&pipeline.paths.train, &pipeline.paths.dev, &pipeline.paths.test,
                  &pipeline.paths.output}) {
    if (!p->empty()) *p = fs::absolute(*p).lexically_normal().string();
  }
  write_config((root / "config.toml").string(), pipeline);

  const auto& embed = model.embed();
  if (model.config().embed.strategy == EmbedStrategy::kLookup) {
    for (size_t i = 0; i < embed.features().size(); ++i) {
      const auto* indexer = dynamic_cast<const VocabIndexer*>(&embed.tables()[i].indexer());
      if (!indexer) throw StateError("save_model: lookup table without a vocabulary");
      std::ofstream out(root / vocab_file(embed.features()[i]));
      out << nlohmann::json(indexer->vocab().symbols()).dump() << '\n';
      if (!out) throw IoError("failed writing vocabulary in " + dir);
    }
  }

  nlohmann::json tensors = nlohmann::json::array();
  std::ofstream blob(root / "params.bin", std::ios::binary);
  if (!blob) throw IoError("cannot write " + (root / "params.bin").string());
  uint64_t offset = 0;
  for (Tensor2D<T>* p : model.parameters()) {
    const uint64_t count = static_cast<uint64_t>(p->size());
    tensors.push_back({{"name", p->name},
                       {"shape", {p->rows(), p->cols()}},
                       {"offset", offset},
                       {"count", count}});
    for (Index r = 0; r < p->rows(); ++r) {
      for (Index c = 0; c < p->cols(); ++c) {
        const float v = static_cast<float>(p->value(r, c));
        const uint32_t bits = to_little(std::bit_cast<uint32_t>(v));
        blob.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
      }
    }
    offset += count;
  }
  if (!blob) throw IoError("failed writing params.bin in " + dir);

  nlohmann::json manifest = {{"format", kFormat},
                             {"dtype", "float32"},
                             {"byte_order", "little"},
                             {"parameters", offset},
                             {"tensors", tensors}};
  std::ofstream out(root / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest.json in " + dir);
}

LoadedModel load_model(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw IoError("model directory not found: " + dir);
  LoadedModel loaded;
  loaded.config = parse_config((root / "config.toml").string());
  const ModelConfig& mc = loaded.config.model;
  mc.validate();

  std::vector<Vocabulary> vocabs;
  if (mc.embed.strategy == EmbedStrategy::kLookup) {
    for (Feature f : mc.embed.ordered_features()) {
      const auto j = read_json(root / vocab_file(f));
      if (!j.is_array()) throw ValidationError(vocab_file(f) + ": expected an array");
      vocabs.emplace_back(j.get<std::vector<std::string>>());
    }
  }
  std::shared_ptr<const StaticVectorTable> vectors;
  if (mc.embed.include_static_vectors) {
    vectors = std::make_shared<StaticVectorTable>(
        load_static_vectors(mc.embed.static_vectors_path));
  }
  loaded.model = std::make_unique<NerModel<float>>(mc, std::move(vocabs), vectors);

  const auto manifest = read_json(root / "manifest.json");
  try {
    if (manifest.at("format") != kFormat || manifest.at("dtype") != "float32" ||
        manifest.at("byte_order") != "little") {
      throw ValidationError("manifest.json: unsupported format");
    }
    const auto params = loaded.model->parameters();
    const auto& tensors = manifest.at("tensors");
    if (tensors.size() != params.size()) {
      throw ValidationError("manifest.json: " + std::to_string(tensors.size()) +
                            " tensors, model has " + std::to_string(params.size()));
    }
    const uint64_t total = manifest.at("parameters").get<uint64_t>();
    const auto blob_size = fs::file_size(root / "params.bin");
    if (blob_size != total * sizeof(float)) {
      throw ValidationError("params.bin: " + std::to_string(blob_size) +
                            " bytes, manifest expects " + std::to_string(total * 4));
    }
    std::ifstream blob(root / "params.bin", std::ios::binary);
    if (!blob) throw IoError("cannot open params.bin in " + dir);
    std::vector<uint32_t> bits;
    for (size_t i = 0; i < params.size(); ++i) {
      Tensor2D<float>& p = *params[i];
      const auto& t = tensors[i];
      const auto shape = t.at("shape").get<std::vector<int64_t>>();
      const uint64_t offset = t.at("offset").get<uint64_t>();
      const uint64_t count = t.at("count").get<uint64_t>();
      if (t.at("name") != p.name || shape.size() != 2 || shape[0] != p.rows() ||
          shape[1] != p.cols() || count != static_cast<uint64_t>(p.size())) {
        throw ValidationError("manifest.json: tensor " + std::to_string(i) + " (" +
                              t.at("name").get<std::string>() + ") does not match " + p.name);
      }
      if (offset + count > total) {
        throw ValidationError("manifest.json: tensor " + p.name + " exceeds params.bin");
      }
      bits.resize(count);
      blob.seekg(static_cast<std::streamoff>(offset * sizeof(float)));
      blob.read(reinterpret_cast<char*>(bits.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
      if (!blob) throw IoError("params.bin: short read for " + p.name);
      size_t k = 0;
      for (Index r = 0; r < p.rows(); ++r) {
        for (Index c = 0; c < p.cols(); ++c) {
          p.value(r, c) = std::bit_cast<float>(to_little(bits[k++]));
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  return loaded;
}

template void save_model<float>(const std::string&, NerModel<float>&, PipelineConfig);
template void save_model<double>(const std::string&, NerModel<double>&, PipelineConfig);

}  // namespace hashner
