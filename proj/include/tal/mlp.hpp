// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fully connected classifier D -> hidden... -> C with ReLU hidden units and
// hand-written backpropagation. The last hidden activation is the feature
// vector summarized by the typicalness queue; the final affine output is the
// logit vector.

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "tal/core_math.hpp"

namespace tal {

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out

  std::size_t in_dim() const { return weights.cols; }
  std::size_t out_dim() const { return weights.rows; }
  bool operator==(const DenseLayer&) const = default;
};

enum class Backend { kSerial, kParallel };

// Activations of every layer for one mini-batch; activations[0] is the input
// and activations.back() holds the logits.
struct BatchTrace {
  std::vector<Matrix> activations;

  const Matrix& logits() const { return activations.back(); }
  const Matrix& features() const { return activations[activations.size() - 2]; }
};

class Mlp {
 public:
  Mlp() = default;
  // All-zero parameters. dims = {input, hidden..., classes}, at least one
  // hidden layer.
  explicit Mlp(std::vector<std::size_t> dims);

  static Mlp random(std::vector<std::size_t> dims, std::mt19937_64& rng);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t n_classes() const { return dims_.back(); }
  std::size_t feature_dim() const { return dims_[dims_.size() - 2]; }
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Parameters flattened as weights then bias per layer, in layer order.
  std::vector<double*> parameter_pointers();

  struct Output {
    Vector features;
    Vector logits;
  };
  Output forward(std::span<const double> input) const;

  BatchTrace forward_batch(const Matrix& inputs, Backend backend = Backend::kParallel) const;

  // Accumulates d(loss)/d(params) given d(loss)/d(logits) per batch row.
  // `grads` must have this network's shape; it is overwritten.
  void backward_batch(const BatchTrace& trace, const Matrix& grad_logits, Mlp& grads,
                      Backend backend = Backend::kParallel) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<DenseLayer> layers_;
};

// SGD with heavy-ball momentum and L2 weight decay:
//   v <- momentum * v + (g + weight_decay * w);  w <- w - lr * v.
void sgd_step(Mlp& params, Mlp& velocity, const Mlp& grads, double lr, double momentum,
              double weight_decay);

// lr0 * 0.5 * (1 + cos(pi * epoch / total_epochs)).
double cosine_annealed_lr(double lr0, std::size_t epoch, std::size_t total_epochs);

}  // namespace tal
