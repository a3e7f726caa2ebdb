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

#ifndef HASHNER_FEATURES_H_
#define HASHNER_FEATURES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hashner {

// Orthographic views of a token. Declaration order is the fixed
// concatenation order used by the embedding layer.
enum class Feature : uint8_t { kOrth = 0, kNorm, kPrefix, kSuffix, kShape };

inline constexpr std::array<Feature, 5> kAllFeatures = {
    Feature::kOrth, Feature::kNorm, Feature::kPrefix, Feature::kSuffix,
    Feature::kShape};

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

struct LexicalFeatures {
  std::string orth;
  std::string norm;
  std::string prefix;
  std::string suffix;
  std::string shape;

  const std::string& get(Feature f) const;
  bool operator==(const LexicalFeatures&) const = default;
};

// Exact-match whole-token replacements applied after lowercasing.
using Substitutions = std::unordered_map<std::string, std::string>;

// Reads a JSON object {"token": "replacement", ...}.
Substitutions load_substitutions(const std::string& path);

// Splits UTF-8 into scalar values; malformed bytes become one unit each.
std::vector<std::string_view> utf8_scalars(std::string_view text);

std::string norm_of(std::string_view token, const Substitutions& subs = {});
std::string prefix_of(std::string_view token);
std::string suffix_of(std::string_view token);
std::string shape_of(std::string_view token);

LexicalFeatures extract_features(std::string_view token,
                                 const Substitutions& subs = {});

}  // namespace hashner

#endif  // HASHNER_FEATURES_H_
