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

#include "hashner/synthetic.h"

#include <algorithm>
#include <string>
#include <vector>

#include "hashner/errors.h"
#include "hashner/rng.h"

namespace hashner {
namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

char pick(std::string_view from, Rng& rng) { return from[rng.below(from.size())]; }

std::string syllables(int count, Rng& rng) {
  std::string out;
  for (int i = 0; i < count; ++i) {
    out.push_back(pick(kConsonants, rng));
    out.push_back(pick(kVowels, rng));
  }
  return out;
}

char upper(char c) { return static_cast<char>(c - 'a' + 'A'); }

// Capitalized, 6 or 8 letters: shape "Xxxxx".
std::string name(Rng& rng) {
  std::string s = syllables(3 + static_cast<int>(rng.below(2)), rng);
  s[0] = upper(s[0]);
  return s;
}

// "BaDoxi": shape "XxXxxx".
std::string camel(Rng& rng) {
  std::string a = syllables(1, rng);
  std::string b = syllables(2, rng);
  a[0] = upper(a[0]);
  b[0] = upper(b[0]);
  return a + b;
}

std::string digits(int count, Rng& rng, bool leading_nonzero) {
  std::string s;
  for (int i = 0; i < count; ++i) {
    const int lo = (i == 0 && leading_nonzero) ? 1 : 0;
    s.push_back(static_cast<char>('0' + lo + rng.below(10 - lo)));
  }
  return s;
}

std::string year(Rng& rng) { return std::to_string(1800 + rng.below(250)); }

// Lowercase filler vocabulary with a skewed frequency profile.
class Filler {
 public:
  explicit Filler(Rng& rng) {
    for (int i = 0; i < 400; ++i) {
      std::string w = syllables(1 + static_cast<int>(rng.below(4)), rng);
      if (rng.uniform() < 0.3) w.pop_back();
      words_.push_back(w);
    }
  }
  const std::string& draw(Rng& rng) const {
    // Squaring a uniform favours low indices.
    const double u = rng.uniform();
    return words_[static_cast<size_t>(u * u * words_.size())];
  }

 private:
  std::vector<std::string> words_;
};

std::string extra(const Filler& filler, Rng& rng) {
  switch (rng.below(9)) {
    case 0: {  // acronym
      std::string s;
      for (int i = 0, n = 2 + static_cast<int>(rng.below(3)); i < n; ++i) {
        s.push_back(upper(pick(kConsonants, rng)));
      }
      return s;
    }
    case 1: return digits(1 + static_cast<int>(rng.below(2)), rng, true) + "." +
                   digits(1 + static_cast<int>(rng.below(2)), rng, false);
    case 2: return digits(1, rng, true) + "," + digits(3, rng, false);
    case 3: return filler.draw(rng) + "-" + filler.draw(rng);
    case 4: return filler.draw(rng) + "'s";
    case 5: return digits(1 + static_cast<int>(rng.below(2)), rng, true) + "%";
    case 6: return std::string(1, "();:!?"[rng.below(6)]);
    case 7: return digits(1 + static_cast<int>(rng.below(2)), rng, true);
    default: return "\"";
  }
}

struct Insert {
  enum Kind { kPerson, kDate, kCamel, kNumber, kExtra } kind;
};

}  // namespace

Corpus generate_synthetic(const SyntheticConfig& config) {
  if (config.sentences < 0 || config.min_filler < 1 ||
      config.max_filler < config.min_filler) {
    throw ValidationError("synthetic: invalid sizes");
  }
  Rng root(config.seed);
  Rng vocab_rng = root.split(1);
  Rng rng = root.split(2);
  const Filler filler(vocab_rng);

  Corpus corpus;
  corpus.reserve(config.sentences);
  for (int s = 0; s < config.sentences; ++s) {
    std::vector<Insert::Kind> inserts;
    if (rng.uniform() < config.person_rate) inserts.push_back(Insert::kPerson);
    if (rng.uniform() < config.date_rate) inserts.push_back(Insert::kDate);
    if (rng.uniform() < config.camel_rate) inserts.push_back(Insert::kCamel);
    if (rng.uniform() < config.number_rate) inserts.push_back(Insert::kNumber);
    if (rng.uniform() < config.extra_rate) inserts.push_back(Insert::kExtra);
    if (rng.uniform() < 0.25 && !inserts.empty()) inserts.push_back(inserts.front());
    rng.shuffle(inserts.begin(), inserts.end());

    const int n_filler = config.min_filler +
                         static_cast<int>(rng.below(config.max_filler - config.min_filler + 1));
    // Slot j (0..n_filler) holds the insert placed before filler word j.
    std::vector<int> slots(inserts.size());
    for (auto& slot : slots) slot = static_cast<int>(rng.below(n_filler + 1));
    std::sort(slots.begin(), slots.end());

    Document doc;
    doc.id = "synthetic#" + std::to_string(s);
    size_t next = 0;
    for (int j = 0; j <= n_filler; ++j) {
      while (next < inserts.size() && slots[next] == j) {
        // Keep inserted segments apart so spans stay unambiguous.
        if (!doc.tokens.empty() && next > 0 && slots[next - 1] == j) {
          doc.tokens.push_back(filler.draw(rng));
        }
        const int start = doc.length();
        switch (inserts[next]) {
          case Insert::kPerson: {
            const int len = 1 + static_cast<int>(rng.below(3));
            for (int k = 0; k < len; ++k) doc.tokens.push_back(name(rng));
            doc.entities.push_back(EntitySpan{start, start + len, "PERSON"});
            break;
          }
          case Insert::kDate: {
            const int len = 1 + static_cast<int>(rng.below(2));
            for (int k = 0; k < len; ++k) doc.tokens.push_back(year(rng));
            doc.entities.push_back(EntitySpan{start, start + len, "DATE"});
            break;
          }
          case Insert::kCamel:
            doc.tokens.push_back(camel(rng));
            break;
          case Insert::kNumber:
            // Same leading digits as the years.
            doc.tokens.push_back(std::to_string(100 + rng.below(200)));
            break;
          case Insert::kExtra:
            doc.tokens.push_back(extra(filler, rng));
            break;
        }
        ++next;
      }
      if (j < n_filler) doc.tokens.push_back(filler.draw(rng));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace hashner
