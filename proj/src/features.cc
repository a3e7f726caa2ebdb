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

#include "hashner/features.h"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>
#include <unicode/utf8.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hashner/errors.h"

namespace hashner {
namespace {

void require_nonempty(std::string_view token, const char* op) {
  if (token.empty()) {
    throw std::invalid_argument(std::string(op) + ": empty token");
  }
}

// Typographic quotes and dashes folded to ASCII.
const std::unordered_map<UChar32, char>& typographic_map() {
  static const std::unordered_map<UChar32, char> map = {
      {0x2018, '\''}, {0x2019, '\''}, {0x201A, '\''}, {0x201B, '\''},
      {0x2032, '\''}, {0x201C, '"'},  {0x201D, '"'},  {0x201E, '"'},
      {0x201F, '"'},  {0x2033, '"'},  {0x00AB, '"'},  {0x00BB, '"'},
      {0x2010, '-'},  {0x2011, '-'},  {0x2012, '-'},  {0x2013, '-'},
      {0x2014, '-'},  {0x2015, '-'},  {0x2212, '-'},
  };
  return map;
}

char shape_class(UChar32 c) {
  switch (u_charType(c)) {
    case U_UPPERCASE_LETTER:
      return 'X';
    case U_LOWERCASE_LETTER:
      return 'x';
    case U_DECIMAL_DIGIT_NUMBER:
      return 'd';
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
      return u_isUUppercase(c) ? 'X' : 'x';
    default:
      return 0;
  }
}

}  // namespace

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::kOrth: return "ORTH";
    case Feature::kNorm: return "NORM";
    case Feature::kPrefix: return "PREFIX";
    case Feature::kSuffix: return "SUFFIX";
    case Feature::kShape: return "SHAPE";
  }
  return "?";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  return std::nullopt;
}

const std::string& LexicalFeatures::get(Feature f) const {
  switch (f) {
    case Feature::kOrth: return orth;
    case Feature::kNorm: return norm;
    case Feature::kPrefix: return prefix;
    case Feature::kSuffix: return suffix;
    case Feature::kShape: return shape;
  }
  return orth;
}

Substitutions load_substitutions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open substitution table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": expected a JSON object");
  Substitutions subs;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      throw ParseError(path + ": replacement for \"" + key + "\" is not a string");
    }
    subs[key] = value.get<std::string>();
  }
  return subs;
}

std::vector<std::string_view> utf8_scalars(std::string_view text) {
  std::vector<std::string_view> out;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) i = start + 1;
    out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::string norm_of(std::string_view token, const Substitutions& subs) {
  require_nonempty(token, "norm_of");
  std::string lowered;
  icu::UnicodeString::fromUTF8(icu::StringPiece(token.data(),
                                                static_cast<int32_t>(token.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(lowered);
  std::string folded;
  folded.reserve(lowered.size());
  const auto& typo = typographic_map();
  const auto* s = reinterpret_cast<const uint8_t*>(lowered.data());
  const int32_t length = static_cast<int32_t>(lowered.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) i = start + 1;
    auto it = typo.find(c);
    if (it != typo.end()) {
      folded.push_back(it->second);
    } else {
      folded.append(lowered, start, i - start);
    }
  }
  auto it = subs.find(folded);
  return it != subs.end() ? it->second : folded;
}

std::string prefix_of(std::string_view token) {
  require_nonempty(token, "prefix_of");
  return std::string(utf8_scalars(token).front());
}

std::string suffix_of(std::string_view token) {
  require_nonempty(token, "suffix_of");
  const auto scalars = utf8_scalars(token);
  const size_t first = scalars.size() > 3 ? scalars.size() - 3 : 0;
  const size_t offset = scalars[first].data() - token.data();
  return std::string(token.substr(offset));
}

std::string shape_of(std::string_view token) {
  require_nonempty(token, "shape_of");
  std::string shape;
  std::string_view last;
  int run = 0;
  const auto* s = reinterpret_cast<const uint8_t*>(token.data());
  const int32_t length = static_cast<int32_t>(token.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) i = start + 1;
    const char cls = c < 0 ? 0 : shape_class(c);
    // Mapped character: a class letter or the original scalar.
    const std::string_view mapped =
        cls ? std::string_view(cls == 'X' ? "X" : cls == 'x' ? "x" : "d")
            : token.substr(start, i - start);
    if (mapped == last) {
      ++run;
    } else {
      last = mapped;
      run = 1;
    }
    if (run <= 4) shape.append(mapped);
  }
  return shape;
}

LexicalFeatures extract_features(std::string_view token,
                                 const Substitutions& subs) {
  return LexicalFeatures{std::string(token), norm_of(token, subs),
                         prefix_of(token), suffix_of(token), shape_of(token)};
}

}  // namespace hashner
