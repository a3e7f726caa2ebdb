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

#include "hashner/encoder.h"

#include <string>

#include "hashner/errors.h"

namespace hashner {

void EncoderConfig::validate() const {
  if (depth < 1) throw ConfigError("encoder.depth: must be >= 1");
  if (window < 1 || window % 2 == 0) {
    throw ConfigError("encoder.window: must be odd and >= 1");
  }
  if (width < 1) throw ConfigError("encoder.width: must be > 0");
  if (maxout_pieces < 1) throw ConfigError("encoder.maxout_pieces: must be >= 1");
}

template <typename T>
ConvEncoder<T>::ConvEncoder(const EncoderConfig& config) : config_(config) {
  config_.validate();
  for (int l = 0; l < config_.depth; ++l) {
    const std::string prefix = "encoder." + std::to_string(l);
    maxouts_.emplace_back(prefix + ".maxout", config_.window * config_.width,
                          config_.width, config_.maxout_pieces);
    norms_.emplace_back(prefix + ".norm", config_.width);
  }
}

template <typename T>
void ConvEncoder<T>::init(Rng& rng) {
  for (int l = 0; l < config_.depth; ++l) {
    maxouts_[l].init(rng);
    norms_[l].init(rng);
  }
}

template <typename T>
Matrix<T> ConvEncoder<T>::gather_windows(const Matrix<T>& x,
                                         std::span<const int> offsets) const {
  const int d = config_.width;
  const int h = config_.half_window();
  Matrix<T> w = Matrix<T>::Zero(x.rows(), static_cast<Index>(config_.window) * d);
  for (size_t doc = 0; doc + 1 < offsets.size(); ++doc) {
    const int begin = offsets[doc];
    const int end = offsets[doc + 1];
    for (int t = begin; t < end; ++t) {
      for (int o = -h; o <= h; ++o) {
        const int src = t + o;
        if (src < begin || src >= end) continue;
        w.row(t).segment(static_cast<Index>(o + h) * d, d) = x.row(src);
      }
    }
  }
  return w;
}

template <typename T>
Matrix<T> ConvEncoder<T>::scatter_windows(const Matrix<T>& dw,
                                          std::span<const int> offsets) const {
  const int d = config_.width;
  const int h = config_.half_window();
  Matrix<T> dx = Matrix<T>::Zero(dw.rows(), d);
  for (size_t doc = 0; doc + 1 < offsets.size(); ++doc) {
    const int begin = offsets[doc];
    const int end = offsets[doc + 1];
    for (int t = begin; t < end; ++t) {
      for (int o = -h; o <= h; ++o) {
        const int src = t + o;
        if (src < begin || src >= end) continue;
        dx.row(src) += dw.row(t).segment(static_cast<Index>(o + h) * d, d);
      }
    }
  }
  return dx;
}

template <typename T>
Matrix<T> ConvEncoder<T>::forward(const Matrix<T>& x, std::span<const int> offsets,
                                  EncoderCache<T>* cache, Rng* dropout_rng,
                                  double dropout) const {
  if (x.cols() != config_.width) {
    throw ConfigError("encoder: input width " + std::to_string(x.cols()) +
                      " != encoder.width " + std::to_string(config_.width));
  }
  if (offsets.empty() || offsets.back() != x.rows()) {
    throw std::invalid_argument("encoder: document offsets do not cover input");
  }
  if (cache) cache->layers.assign(config_.depth, {});
  Matrix<T> h = x;
  for (int l = 0; l < config_.depth; ++l) {
    EncoderLayerCache<T> local;
    EncoderLayerCache<T>& c = cache ? cache->layers[l] : local;
    c.windows = gather_windows(h, offsets);
    Matrix<T> y = maxouts_[l].forward(c.windows, &c.maxout);
    y += h;
    h = norms_[l].forward(y, cache ? &c.norm : nullptr);
    if (dropout_rng && dropout > 0.0) {
      c.dropout = dropout_mask<T>(h.rows(), h.cols(), dropout, *dropout_rng, true);
      h.array() *= c.dropout.array();
    } else {
      c.dropout.resize(0, 0);
    }
    if (!cache) c = {};
  }
  return h;
}

template <typename T>
Matrix<T> ConvEncoder<T>::backward(const Matrix<T>& dy, std::span<const int> offsets,
                                   EncoderCache<T>& cache) {
  Matrix<T> g = dy;
  for (int l = config_.depth - 1; l >= 0; --l) {
    EncoderLayerCache<T>& c = cache.layers[l];
    if (c.dropout.size() > 0) g.array() *= c.dropout.array();
    const Matrix<T> dsum = norms_[l].backward(g, c.norm);
    const Matrix<T> dwindows = maxouts_[l].backward(c.windows, dsum, c.maxout);
    g = dsum + scatter_windows(dwindows, offsets);
  }
  return g;
}

template <typename T>
void ConvEncoder<T>::collect(ParamList<T>& out) {
  for (int l = 0; l < config_.depth; ++l) {
    maxouts_[l].collect(out);
    norms_[l].collect(out);
  }
}

template class ConvEncoder<float>;
template class ConvEncoder<double>;

}  // namespace hashner
