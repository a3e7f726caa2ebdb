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

#include "hashner/evaluate.h"

#include <set>

#include "hashner/errors.h"

namespace hashner {

void Prf::finalize() {
  if (tp + fp + fn == 0) {
    precision = recall = f1 = 1.0;
    return;
  }
  precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

nlohmann::json Prf::to_json() const {
  return {{"precision", precision}, {"recall", recall}, {"f1", f1},
          {"tp", tp},               {"fp", fp},         {"fn", fn}};
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["documents"] = documents;
  j["micro"] = micro.to_json();
  j["per_label"] = nlohmann::json::object();
  for (const auto& [label, prf] : per_label) j["per_label"][label] = prf.to_json();
  if (seen) j["seen"] = seen->to_json();
  if (unseen) j["unseen"] = unseen->to_json();
  return j;
}

namespace {

void count(const std::set<EntitySpan>& gold, const std::set<EntitySpan>& pred, Prf& out,
           std::map<std::string, Prf>* per_label) {
  for (const auto& p : pred) {
    const bool hit = gold.count(p) > 0;
    (hit ? out.tp : out.fp) += 1;
    if (per_label) {
      Prf& l = (*per_label)[p.label];
      (hit ? l.tp : l.fp) += 1;
    }
  }
  for (const auto& g : gold) {
    if (pred.count(g)) continue;
    out.fn += 1;
    if (per_label) (*per_label)[g.label].fn += 1;
  }
}

}  // namespace

EvalReport score_corpus(const Corpus& gold,
                        const std::vector<std::vector<EntitySpan>>& predicted,
                        const std::unordered_set<std::string>* known) {
  if (gold.size() != predicted.size()) {
    throw ValidationError("score_corpus: one prediction list per document required");
  }
  EvalReport report;
  report.documents = gold.size();
  Prf seen, unseen;
  for (size_t d = 0; d < gold.size(); ++d) {
    const Document& doc = gold[d];
    const std::set<EntitySpan> g(doc.entities.begin(), doc.entities.end());
    std::set<EntitySpan> p;
    for (const auto& span : predicted[d]) {
      if (span.start < 0 || span.end > doc.length() || span.start >= span.end) {
        throw ValidationError(doc.id + ": predicted span outside the document");
      }
      p.insert(span);
    }
    count(g, p, report.micro, &report.per_label);
    if (!known) continue;
    std::set<EntitySpan> g_seen, g_unseen, p_seen, p_unseen;
    for (const auto& s : g) (known->count(doc.text(s)) ? g_seen : g_unseen).insert(s);
    for (const auto& s : p) (known->count(doc.text(s)) ? p_seen : p_unseen).insert(s);
    count(g_seen, p_seen, seen, nullptr);
    count(g_unseen, p_unseen, unseen, nullptr);
  }
  report.micro.finalize();
  for (auto& [label, prf] : report.per_label) prf.finalize();
  if (known) {
    seen.finalize();
    unseen.finalize();
    report.seen = seen;
    report.unseen = unseen;
  }
  return report;
}

}  // namespace hashner
