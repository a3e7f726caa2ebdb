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

#ifndef HASHNER_ENCODER_H_
#define HASHNER_ENCODER_H_

#include <span>
#include <vector>

#include "hashner/nn.h"
#include "hashner/rng.h"

namespace hashner {

struct EncoderConfig {
  int depth = 8;
  int window = 3;  // total tokens per window, odd
  int width = 96;
  int maxout_pieces = 3;

  int half_window() const { return (window - 1) / 2; }
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

template <typename T>
struct EncoderLayerCache {
  Matrix<T> windows;  // N x window*width
  MaxoutCache maxout;
  LayerNormCache<T> norm;
  Matrix<T> dropout;  // empty when dropout was off
};

template <typename T>
struct EncoderCache {
  std::vector<EncoderLayerCache<T>> layers;
};

// Stacked convolution blocks. Each block maps the window around every token
// (zero vectors past document edges) through a maxout, adds the block input
// and layer-normalizes the sum. Rows of the input belong to the documents
// delimited by `offsets` (size = documents + 1).
template <typename T>
class ConvEncoder {
 public:
  explicit ConvEncoder(const EncoderConfig& config);

  void init(Rng& rng);
  const EncoderConfig& config() const { return config_; }

  // With `dropout_rng` null the pass is deterministic inference.
  Matrix<T> forward(const Matrix<T>& x, std::span<const int> offsets,
                    EncoderCache<T>* cache, Rng* dropout_rng = nullptr,
                    double dropout = 0.0) const;
  Matrix<T> backward(const Matrix<T>& dy, std::span<const int> offsets,
                     EncoderCache<T>& cache);

  Maxout<T>& maxout(int layer) { return maxouts_[layer]; }
  LayerNorm<T>& norm(int layer) { return norms_[layer]; }
  void collect(ParamList<T>& out);

 private:
  Matrix<T> gather_windows(const Matrix<T>& x, std::span<const int> offsets) const;
  Matrix<T> scatter_windows(const Matrix<T>& dw, std::span<const int> offsets) const;

  EncoderConfig config_;
  std::vector<Maxout<T>> maxouts_;
  std::vector<LayerNorm<T>> norms_;
};

}  // namespace hashner

#endif  // HASHNER_ENCODER_H_
