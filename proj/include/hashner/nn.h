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

#ifndef HASHNER_NN_H_
#define HASHNER_NN_H_

// Dense layers with hand-written reverse-mode gradients.
//
// Every layer is a template over the scalar type: models train in float and
// the same code runs in double for finite-difference gradient checks. Layers
// operate on batches stored as row-major matrices, one example per row.
// forward() fills a caller-owned cache; backward() consumes it, accumulates
// parameter gradients (+=) and returns the gradient for the layer input.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashner/rng.h"

namespace hashner {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;
using IndexMatrix =
    Eigen::Matrix<int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// Named parameter block with a gradient buffer of identical shape.
template <typename T>
struct Tensor2D {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;

  Tensor2D() = default;
  Tensor2D(std::string n, Index rows, Index cols)
      : name(std::move(n)),
        value(Matrix<T>::Zero(rows, cols)),
        grad(Matrix<T>::Zero(rows, cols)) {}

  Index rows() const { return value.rows(); }
  Index cols() const { return value.cols(); }
  Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }
};

template <typename T>
using ParamList = std::vector<Tensor2D<T>*>;

template <typename T>
bool all_finite(const Matrix<T>& m) {
  return m.allFinite();
}

// Glorot/Xavier uniform.
template <typename T>
void init_glorot(Tensor2D<T>& t, Index fan_in, Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index i = 0; i < t.size(); ++i) {
    t.value.data()[i] = static_cast<T>(rng.uniform(-limit, limit));
  }
}

template <typename T>
void init_uniform(Tensor2D<T>& t, double lo, double hi, Rng& rng) {
  for (Index i = 0; i < t.size(); ++i) {
    t.value.data()[i] = static_cast<T>(rng.uniform(lo, hi));
  }
}

// ---------------------------------------------------------------------------
// Linear: y = x W + b, W is in x out.

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, Index in, Index out)
      : weight_(name + ".W", in, out), bias_(name + ".b", 1, out) {}

  void init(Rng& rng) {
    init_glorot(weight_, in(), out(), rng);
    bias_.value.setZero();
  }

  Index in() const { return weight_.rows(); }
  Index out() const { return weight_.cols(); }

  Matrix<T> forward(const Matrix<T>& x) const {
    check_input(x);
    Matrix<T> y = x * weight_.value;
    y.rowwise() += bias_.value.row(0);
    return y;
  }

  Matrix<T> backward(const Matrix<T>& x, const Matrix<T>& dy) {
    weight_.grad.noalias() += x.transpose() * dy;
    bias_.grad.row(0) += dy.colwise().sum();
    return dy * weight_.value.transpose();
  }

  Tensor2D<T>& weight() { return weight_; }
  Tensor2D<T>& bias() { return bias_; }
  const Tensor2D<T>& weight() const { return weight_; }
  const Tensor2D<T>& bias() const { return bias_; }
  void collect(ParamList<T>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  void check_input(const Matrix<T>& x) const {
    if (x.cols() != in()) {
      throw std::invalid_argument("linear " + weight_.name + ": input width " +
                                  std::to_string(x.cols()) + " != " +
                                  std::to_string(in()));
    }
  }

  Tensor2D<T> weight_;
  Tensor2D<T> bias_;
};

// ---------------------------------------------------------------------------
// Maxout: y_j = max_p (x W_p + b_p)_j.
//
// The pieces are stored interleaved in one in x (out * pieces) matrix; column
// j * pieces + p holds piece p of output j. Ties go to the lowest piece.

struct MaxoutCache {
  IndexMatrix argmax;  // rows x out, winning piece
};

template <typename T>
class Maxout {
 public:
  Maxout() = default;
  Maxout(const std::string& name, Index in, Index out, Index pieces)
      : pieces_(pieces),
        weight_(name + ".W", in, out * pieces),
        bias_(name + ".b", 1, out * pieces) {
    if (in < 1 || out < 1 || pieces < 1) {
      throw std::invalid_argument("maxout " + name + ": extents must be >= 1");
    }
  }

  // Builds a layer from explicit pieces (W_p: in x out, b_p: 1 x out).
  static Maxout from_pieces(const std::string& name,
                            const std::vector<Matrix<T>>& weights,
                            const std::vector<RowVector<T>>& biases) {
    if (weights.empty() || weights.size() != biases.size()) {
      throw std::invalid_argument("maxout needs >= 1 piece and one bias each");
    }
    const Index in = weights[0].rows();
    const Index out = weights[0].cols();
    const Index pieces = static_cast<Index>(weights.size());
    Maxout layer(name, in, out, pieces);
    for (Index p = 0; p < pieces; ++p) {
      if (weights[p].rows() != in || weights[p].cols() != out ||
          biases[p].cols() != out) {
        throw std::invalid_argument("maxout pieces must share one shape");
      }
      for (Index j = 0; j < out; ++j) {
        layer.weight_.value.col(j * pieces + p) = weights[p].col(j);
        layer.bias_.value(0, j * pieces + p) = biases[p](j);
      }
    }
    return layer;
  }

  void init(Rng& rng) {
    init_glorot(weight_, in(), out(), rng);
    bias_.value.setZero();
  }

  Index in() const { return weight_.rows(); }
  Index out() const { return weight_.cols() / pieces_; }
  Index pieces() const { return pieces_; }

  // Pre-activations for all pieces.
  Matrix<T> affine(const Matrix<T>& x) const {
    if (x.cols() != in()) {
      throw std::invalid_argument("maxout " + weight_.name + ": input width " +
                                  std::to_string(x.cols()) + " != " +
                                  std::to_string(in()));
    }
    Matrix<T> z = x * weight_.value;
    z.rowwise() += bias_.value.row(0);
    return z;
  }

  // Reduces pre-activations (rows x out*pieces) over pieces.
  static Matrix<T> reduce(const Matrix<T>& z, Index pieces, MaxoutCache* cache) {
    const Index out = z.cols() / pieces;
    Matrix<T> y(z.rows(), out);
    if (cache) cache->argmax.resize(z.rows(), out);
    for (Index r = 0; r < z.rows(); ++r) {
      const T* zr = z.row(r).data();
      for (Index j = 0; j < out; ++j) {
        const T* zj = zr + j * pieces;
        Index best = 0;
        for (Index p = 1; p < pieces; ++p) {
          if (zj[p] > zj[best]) best = p;
        }
        y(r, j) = zj[best];
        if (cache) cache->argmax(r, j) = static_cast<int32_t>(best);
      }
    }
    return y;
  }

  // Routes dy to the winning pieces; result has the pre-activation shape.
  static Matrix<T> expand(const Matrix<T>& dy, Index pieces,
                          const MaxoutCache& cache) {
    Matrix<T> dz = Matrix<T>::Zero(dy.rows(), dy.cols() * pieces);
    for (Index r = 0; r < dy.rows(); ++r) {
      for (Index j = 0; j < dy.cols(); ++j) {
        dz(r, j * pieces + cache.argmax(r, j)) = dy(r, j);
      }
    }
    return dz;
  }

  Matrix<T> forward(const Matrix<T>& x, MaxoutCache* cache) const {
    return reduce(affine(x), pieces_, cache);
  }

  Matrix<T> backward(const Matrix<T>& x, const Matrix<T>& dy,
                     const MaxoutCache& cache) {
    const Matrix<T> dz = expand(dy, pieces_, cache);
    weight_.grad.noalias() += x.transpose() * dz;
    bias_.grad.row(0) += dz.colwise().sum();
    return dz * weight_.value.transpose();
  }

  Tensor2D<T>& weight() { return weight_; }
  Tensor2D<T>& bias() { return bias_; }
  const Tensor2D<T>& weight() const { return weight_; }
  const Tensor2D<T>& bias() const { return bias_; }
  void collect(ParamList<T>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  Index pieces_ = 1;
  Tensor2D<T> weight_;
  Tensor2D<T> bias_;
};

// ---------------------------------------------------------------------------
// Layer normalization over each row, eps inside the square root.

template <typename T>
struct LayerNormCache {
  Matrix<T> normalized;    // pre-affine output
  RowVector<T> inv_std;    // per row
};

template <typename T>
class LayerNorm {
 public:
  static constexpr double kEpsilon = 1e-5;

  LayerNorm() = default;
  LayerNorm(const std::string& name, Index width)
      : gain_(name + ".gain", 1, width), bias_(name + ".bias", 1, width) {
    gain_.value.setOnes();
  }

  void init(Rng&) {
    gain_.value.setOnes();
    bias_.value.setZero();
  }

  Index width() const { return gain_.cols(); }

  Matrix<T> forward(const Matrix<T>& x, LayerNormCache<T>* cache) const {
    if (x.cols() != width()) {
      throw std::invalid_argument("layer norm: input width mismatch");
    }
    const Index d = x.cols();
    Matrix<T> xhat(x.rows(), d);
    RowVector<T> inv_std(x.rows());
    for (Index r = 0; r < x.rows(); ++r) {
      const T mean = x.row(r).mean();
      const auto centered = (x.row(r).array() - mean).matrix();
      const T var = centered.squaredNorm() / static_cast<T>(d);
      inv_std(r) = T(1) / std::sqrt(var + static_cast<T>(kEpsilon));
      xhat.row(r) = centered * inv_std(r);
    }
    Matrix<T> y = xhat.array().rowwise() * gain_.value.row(0).array();
    y.rowwise() += bias_.value.row(0);
    if (cache) {
      cache->normalized = std::move(xhat);
      cache->inv_std = std::move(inv_std);
    }
    return y;
  }

  Matrix<T> backward(const Matrix<T>& dy, const LayerNormCache<T>& cache) {
    const Matrix<T>& xhat = cache.normalized;
    gain_.grad.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
    bias_.grad.row(0) += dy.colwise().sum();
    const Index d = dy.cols();
    const T inv_d = T(1) / static_cast<T>(d);
    Matrix<T> dxhat = dy.array().rowwise() * gain_.value.row(0).array();
    Matrix<T> dx(dy.rows(), d);
    for (Index r = 0; r < dy.rows(); ++r) {
      const T sum = dxhat.row(r).sum();
      const T dot = dxhat.row(r).dot(xhat.row(r));
      dx.row(r) = cache.inv_std(r) * inv_d *
                  (static_cast<T>(d) * dxhat.row(r).array() - sum -
                   xhat.row(r).array() * dot)
                      .matrix();
    }
    return dx;
  }

  Tensor2D<T>& gain() { return gain_; }
  Tensor2D<T>& bias() { return bias_; }
  void collect(ParamList<T>& out) {
    out.push_back(&gain_);
    out.push_back(&bias_);
  }

 private:
  Tensor2D<T> gain_;
  Tensor2D<T> bias_;
};

// ---------------------------------------------------------------------------
// Softmax.

// Max-shifted softmax over all entries of z.
template <typename T>
RowVector<T> softmax(const RowVector<T>& z) {
  if (z.size() < 1) throw std::invalid_argument("softmax of empty vector");
  const T shift = z.maxCoeff();
  RowVector<T> e = (z.array() - shift).exp().matrix();
  return e / e.sum();
}

// Softmax restricted to entries where mask is true; masked entries get
// probability exactly 0. At least one entry must be valid.
template <typename T>
RowVector<T> masked_softmax(const RowVector<T>& z, std::span<const uint8_t> mask) {
  if (static_cast<Index>(mask.size()) != z.size()) {
    throw std::invalid_argument("masked softmax: mask size mismatch");
  }
  T shift = -std::numeric_limits<T>::infinity();
  for (Index i = 0; i < z.size(); ++i) {
    if (mask[i] && z(i) > shift) shift = z(i);
  }
  if (!std::isfinite(static_cast<double>(shift))) {
    throw std::invalid_argument("masked softmax: no valid entries");
  }
  RowVector<T> p = RowVector<T>::Zero(z.size());
  T total = 0;
  for (Index i = 0; i < z.size(); ++i) {
    if (mask[i]) {
      p(i) = std::exp(z(i) - shift);
      total += p(i);
    }
  }
  return p / total;
}

// ---------------------------------------------------------------------------
// Inverted dropout: entries are 0 with probability p, else 1 / (1 - p).
// Outside training every entry is 1.

template <typename T>
Matrix<T> dropout_mask(Index rows, Index cols, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("dropout probability must be in [0, 1)");
  }
  Matrix<T> mask = Matrix<T>::Ones(rows, cols);
  if (!training || p == 0.0) return mask;
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  for (Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < p ? T(0) : keep;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Global-norm gradient clipping. Returns the factor applied (1 if none).

template <typename T>
double clip_gradients(std::span<Tensor2D<T>* const> params, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("max_norm must be > 0");
  double sq = 0.0;
  for (const auto* p : params) {
    sq += static_cast<double>(p->grad.template cast<double>().squaredNorm());
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (auto* p : params) p->grad *= static_cast<T>(scale);
  return scale;
}

// ---------------------------------------------------------------------------
// AdamW with decoupled weight decay and bias-corrected moments.

struct AdamWConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.01;
  double epsilon = 1e-8;
};

template <typename T>
class AdamW {
 public:
  AdamW(AdamWConfig config, ParamList<T> params)
      : config_(config), params_(std::move(params)) {
    for (auto* p : params_) {
      first_.push_back(Matrix<T>::Zero(p->rows(), p->cols()));
      second_.push_back(Matrix<T>::Zero(p->rows(), p->cols()));
    }
  }

  void step() {
    ++step_;
    const double lr = config_.learning_rate;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    const T decay = static_cast<T>(1.0 - lr * config_.weight_decay);
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& value = params_[i]->value;
      const auto& grad = params_[i]->grad;
      auto& m = first_[i];
      auto& v = second_[i];
      if (config_.weight_decay != 0.0) value *= decay;
      m = static_cast<T>(b1) * m + static_cast<T>(1.0 - b1) * grad;
      v = static_cast<T>(b2) * v +
          static_cast<T>(1.0 - b2) * grad.cwiseProduct(grad);
      value.array() -=
          static_cast<T>(lr) * (m.array() / static_cast<T>(correction1)) /
          ((v.array() / static_cast<T>(correction2)).sqrt() +
           static_cast<T>(config_.epsilon));
    }
  }

  int64_t step_count() const { return step_; }
  const AdamWConfig& config() const { return config_; }
  const Matrix<T>& first_moment(size_t i) const { return first_[i]; }
  const Matrix<T>& second_moment(size_t i) const { return second_[i]; }

 private:
  AdamWConfig config_;
  ParamList<T> params_;
  std::vector<Matrix<T>> first_;
  std::vector<Matrix<T>> second_;
  int64_t step_ = 0;
};

}  // namespace hashner

#endif  // HASHNER_NN_H_
