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

#include "hashner/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "hashner/errors.h"
#include "hashner/rng.h"

namespace hashner {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string join_lines(const std::vector<int>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(lines[i]);
  }
  return out;
}

// Splits "B-PER" into ('B', "PER"). Returns false on malformed tags.
bool split_tag(const std::string& tag, char& kind, std::string& label) {
  if (tag == "O") {
    kind = 'O';
    label.clear();
    return true;
  }
  if (tag.size() < 3 || tag[1] != '-') return false;
  kind = tag[0];
  label = tag.substr(2);
  return std::string_view("BILU").find(kind) != std::string_view::npos;
}

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::vector<int> lines;
};

struct RawDocument {
  std::vector<Sentence> sentences;
};

std::vector<EntitySpan> sorted(std::vector<EntitySpan> spans) {
  std::sort(spans.begin(), spans.end());
  return spans;
}

}  // namespace

std::string Document::text(const EntitySpan& span) const {
  std::string out;
  for (int t = span.start; t < span.end; ++t) {
    if (t > span.start) out.push_back(' ');
    out += tokens.at(t);
  }
  return out;
}

void Document::validate() const {
  std::vector<Span> spans;
  for (const auto& e : entities) {
    if (e.label.empty()) throw ValidationError(id + ": entity with empty label");
    spans.push_back(Span{e.start, e.end, 0});
  }
  try {
    GoldIndex check(length(), spans);
  } catch (const ValidationError& e) {
    throw ValidationError(id + ": " + e.what());
  }
}

std::string_view scheme_name(TagScheme s) {
  switch (s) {
    case TagScheme::kAuto: return "auto";
    case TagScheme::kIob1: return "iob1";
    case TagScheme::kIob2: return "iob2";
    case TagScheme::kBiluo: return "biluo";
  }
  return "?";
}

std::optional<TagScheme> parse_scheme(std::string_view name) {
  for (TagScheme s : {TagScheme::kAuto, TagScheme::kIob1, TagScheme::kIob2,
                      TagScheme::kBiluo}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<EntitySpan> decode_tags(std::span<const std::string> tags, TagScheme scheme,
                                    std::span<const int> lines) {
  if (scheme == TagScheme::kAuto) {
    const std::vector<std::vector<std::string>> one = {
        std::vector<std::string>(tags.begin(), tags.end())};
    scheme = detect_scheme(one);
  }
  auto where = [&](int t) {
    return lines.empty() ? t : lines[static_cast<size_t>(t)];
  };
  std::vector<EntitySpan> spans;
  std::vector<int> bad;
  int open_start = -1;
  std::string open_label;
  const int n = static_cast<int>(tags.size());
  auto close = [&](int end) {
    if (open_start >= 0) spans.push_back(EntitySpan{open_start, end, open_label});
    open_start = -1;
  };
  for (int t = 0; t < n; ++t) {
    char kind;
    std::string label;
    if (!split_tag(tags[t], kind, label)) {
      bad.push_back(where(t));
      close(t);
      continue;
    }
    if (scheme == TagScheme::kBiluo) {
      const bool open = open_start >= 0;
      switch (kind) {
        case 'O':
        case 'U':
        case 'B':
          if (open) {
            bad.push_back(where(t));
            open_start = -1;
          }
          if (kind == 'U') spans.push_back(EntitySpan{t, t + 1, label});
          if (kind == 'B') {
            open_start = t;
            open_label = label;
          }
          break;
        default:  // I, L
          if (!open || open_label != label) {
            bad.push_back(where(t));
            open_start = -1;
          } else if (kind == 'L') {
            close(t + 1);
          }
      }
      continue;
    }
    // IOB1 / IOB2.
    switch (kind) {
      case 'O':
        close(t);
        break;
      case 'B':
        close(t);
        open_start = t;
        open_label = label;
        break;
      case 'I':
        if (open_start >= 0 && open_label == label) break;
        if (scheme == TagScheme::kIob2) {
          bad.push_back(where(t));
          close(t);
          break;
        }
        close(t);
        open_start = t;
        open_label = label;
        break;
      default:
        bad.push_back(where(t));
        close(t);
    }
  }
  if (scheme == TagScheme::kBiluo) {
    if (open_start >= 0) bad.push_back(where(n - 1));
  } else {
    close(n);
  }
  if (!bad.empty()) {
    throw ParseError(std::string("malformed ") + std::string(scheme_name(scheme)) +
                         " tag sequence at line(s) " + join_lines(bad),
                     static_cast<size_t>(bad.front()));
  }
  return spans;
}

TagScheme detect_scheme(std::span<const std::vector<std::string>> sentences) {
  bool iob1 = false;
  for (const auto& tags : sentences) {
    char prev_kind = 'O';
    std::string prev_label;
    for (const auto& tag : tags) {
      char kind;
      std::string label;
      if (!split_tag(tag, kind, label)) {
        prev_kind = 'O';
        continue;
      }
      if (kind == 'L' || kind == 'U') return TagScheme::kBiluo;
      if (kind == 'I' && !((prev_kind == 'B' || prev_kind == 'I') && prev_label == label)) {
        iob1 = true;
      }
      prev_kind = kind;
      prev_label = label;
    }
  }
  return iob1 ? TagScheme::kIob1 : TagScheme::kIob2;
}

// ---------------------------------------------------------------------------
// CoNLL

Corpus read_conll(std::istream& in, const std::string& source, TagScheme scheme,
                  std::vector<Problem>* problems) {
  std::vector<RawDocument> raw;
  bool has_docstart = false;
  Sentence current;
  bool current_bad = false;
  std::string line;
  int line_no = 0;
  auto doc_id = [&](size_t index) { return source + "#" + std::to_string(index); };
  auto flush = [&]() {
    if (!current.tokens.empty() && !current_bad) {
      if (raw.empty() || !has_docstart) raw.emplace_back();
      raw.back().sentences.push_back(std::move(current));
    }
    current = Sentence{};
    current_bad = false;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      flush();
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.front() == "-DOCSTART-") {
      flush();
      has_docstart = true;
      raw.emplace_back();
      continue;
    }
    if (fields.size() < 2) {
      const std::string msg = source + ": expected token and tag columns";
      if (!problems) throw ParseError(msg, line_no);
      problems->push_back(Problem{doc_id(raw.size()), line_no, msg});
      current_bad = true;
      continue;
    }
    current.tokens.push_back(fields.front());
    current.tags.push_back(fields.back());
    current.lines.push_back(line_no);
  }
  flush();

  if (scheme == TagScheme::kAuto) {
    std::vector<std::vector<std::string>> all;
    for (const auto& d : raw) {
      for (const auto& s : d.sentences) all.push_back(s.tags);
    }
    scheme = detect_scheme(all);
  }

  Corpus corpus;
  for (const auto& d : raw) {
    Document doc;
    doc.id = doc_id(corpus.size());
    for (const auto& s : d.sentences) {
      std::vector<EntitySpan> spans;
      try {
        spans = decode_tags(s.tags, scheme, s.lines);
      } catch (const ParseError& e) {
        if (!problems) throw ParseError(source + ": " + e.what());
        problems->push_back(Problem{doc.id, static_cast<int>(e.line()), e.what()});
        continue;
      }
      const int offset = doc.length();
      for (auto& sp : spans) {
        doc.entities.push_back(EntitySpan{sp.start + offset, sp.end + offset, sp.label});
      }
      doc.tokens.insert(doc.tokens.end(), s.tokens.begin(), s.tokens.end());
    }
    if (!doc.tokens.empty()) corpus.push_back(std::move(doc));
  }
  return corpus;
}

Corpus read_conll(const std::string& path, TagScheme scheme,
                  std::vector<Problem>* problems) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path);
  return read_conll(in, path, scheme, problems);
}

void write_conll(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus) {
    if (doc.tokens.empty()) continue;
    const auto tags = biluo_encode(doc.length(), doc.entities);
    out << "-DOCSTART- O\n\n";
    for (int t = 0; t < doc.length(); ++t) out << doc.tokens[t] << ' ' << tags[t] << '\n';
    out << '\n';
  }
}

void write_conll(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus: " + path);
  write_conll(out, corpus);
}

// ---------------------------------------------------------------------------
// JSON lines

Corpus read_jsonl(std::istream& in, const std::string& source,
                  std::vector<Problem>* problems) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    Document doc;
    doc.id = source + ":" + std::to_string(line_no);
    auto fail = [&](const std::string& msg) {
      if (!problems) throw ParseError(source + ": " + msg, line_no);
      problems->push_back(Problem{doc.id, line_no, msg});
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
      continue;
    }
    if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
      fail("expected an object with a \"tokens\" array");
      continue;
    }
    if (j.contains("id")) {
      doc.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    }
    bool ok = true;
    for (const auto& t : j["tokens"]) {
      if (!t.is_string() || t.get<std::string>().empty()) {
        ok = false;
        break;
      }
      doc.tokens.push_back(t.get<std::string>());
    }
    if (!ok) {
      fail("tokens must be non-empty strings");
      continue;
    }
    const auto ents = j.value("entities", nlohmann::json::array());
    if (!ents.is_array()) {
      fail("\"entities\" must be an array");
      continue;
    }
    std::vector<int> owner(doc.tokens.size(), -1);
    for (const auto& e : ents) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_string()) {
        fail("entity must be [start, end, \"label\"]");
        ok = false;
        break;
      }
      EntitySpan span{e[0].get<int>(), e[1].get<int>(), e[2].get<std::string>()};
      if (span.start < 0 || span.end > doc.length() || span.start >= span.end ||
          span.label.empty()) {
        fail("entity [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
             "] outside document of " + std::to_string(doc.length()) + " tokens");
        ok = false;
        continue;
      }
      int clash = -1;
      for (int t = span.start; t < span.end; ++t) {
        if (owner[t] >= 0) clash = t;
      }
      if (clash >= 0) {
        fail("entity [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
             ", " + span.label + "] overlaps another entity at token " +
             std::to_string(clash));
        ok = false;
        continue;
      }
      for (int t = span.start; t < span.end; ++t) owner[t] = 1;
      doc.entities.push_back(std::move(span));
    }
    doc.entities = sorted(std::move(doc.entities));
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

Corpus read_jsonl(const std::string& path, std::vector<Problem>* problems) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path);
  return read_jsonl(in, path, problems);
}

void write_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus) {
    nlohmann::json j;
    j["id"] = doc.id;
    j["tokens"] = doc.tokens;
    auto ents = nlohmann::json::array();
    for (const auto& e : doc.entities) ents.push_back({e.start, e.end, e.label});
    j["entities"] = ents;
    out << j.dump() << '\n';
  }
}

void write_jsonl(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus: " + path);
  write_jsonl(out, corpus);
}

namespace {
bool is_jsonl(const std::string& path) {
  auto ends = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends(".jsonl") || ends(".json");
}
}  // namespace

Corpus read_corpus(const std::string& path, TagScheme scheme,
                   std::vector<Problem>* problems) {
  return is_jsonl(path) ? read_jsonl(path, problems) : read_conll(path, scheme, problems);
}

void write_corpus(const std::string& path, const Corpus& corpus) {
  if (is_jsonl(path)) {
    write_jsonl(path, corpus);
  } else {
    write_conll(path, corpus);
  }
}

// ---------------------------------------------------------------------------
// Splits and statistics

Split random_split(const Corpus& corpus, std::array<double, 3> fractions, uint64_t seed) {
  if (corpus.empty()) throw ValidationError("random_split: empty corpus");
  double total = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw ValidationError("random_split: negative fraction");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("random_split: fractions must sum to 1");
  }
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());
  const size_t n = corpus.size();
  const size_t n_train = std::min(n, static_cast<size_t>(std::llround(fractions[0] * n)));
  const size_t n_dev =
      std::min(n - n_train, static_cast<size_t>(std::llround(fractions[1] * n)));
  Split split;
  for (size_t i = 0; i < n; ++i) {
    const Document& d = corpus[order[i]];
    if (i < n_train) {
      split.train.push_back(d);
    } else if (i < n_train + n_dev) {
      split.dev.push_back(d);
    } else {
      split.test.push_back(d);
    }
  }
  return split;
}

std::unordered_set<std::string> entity_texts(const Corpus& corpus) {
  std::unordered_set<std::string> out;
  for (const auto& doc : corpus) {
    for (const auto& e : doc.entities) out.insert(doc.text(e));
  }
  return out;
}

std::vector<std::vector<bool>> unseen_partition(const Corpus& train, const Corpus& eval) {
  const auto known = entity_texts(train);
  std::vector<std::vector<bool>> seen;
  seen.reserve(eval.size());
  for (const auto& doc : eval) {
    std::vector<bool> flags;
    for (const auto& e : doc.entities) flags.push_back(known.count(doc.text(e)) > 0);
    seen.push_back(std::move(flags));
  }
  return seen;
}

DatasetStats dataset_stats(const Corpus& corpus, const StaticVectorTable* vectors) {
  DatasetStats s;
  s.documents = corpus.size();
  std::set<std::string> vocab;
  size_t entity_tokens = 0;
  for (const auto& doc : corpus) {
    s.tokens += doc.tokens.size();
    s.entities += doc.entities.size();
    for (const auto& t : doc.tokens) vocab.insert(t);
    for (const auto& e : doc.entities) {
      entity_tokens += static_cast<size_t>(e.end - e.start);
      ++s.label_counts[e.label];
    }
  }
  s.vocabulary = vocab.size();
  if (s.documents) {
    s.entities_per_document = static_cast<double>(s.entities) / s.documents;
    s.document_length = static_cast<double>(s.tokens) / s.documents;
  }
  if (s.entities) s.entity_length = static_cast<double>(entity_tokens) / s.entities;
  if (vectors) {
    size_t unknown = 0;
    for (const auto& w : vocab) unknown += vectors->contains(w) ? 0 : 1;
    s.unknown_to_static = unknown;
  }
  return s;
}

std::map<Feature, size_t> feature_count_report(const Corpus& corpus) {
  const std::array<Feature, 4> features = {Feature::kNorm, Feature::kPrefix,
                                           Feature::kSuffix, Feature::kShape};
  std::map<Feature, std::unordered_set<std::string>> seen;
  for (const auto& doc : corpus) {
    for (const auto& t : doc.tokens) {
      const auto lex = extract_features(t);
      for (Feature f : features) seen[f].insert(lex.get(f));
    }
  }
  std::map<Feature, size_t> counts;
  for (Feature f : features) counts[f] = seen[f].size();
  return counts;
}

std::vector<std::string> corpus_labels(const Corpus& corpus) {
  std::set<std::string> labels;
  for (const auto& doc : corpus) {
    for (const auto& e : doc.entities) labels.insert(e.label);
  }
  return {labels.begin(), labels.end()};
}

}  // namespace hashner
