// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-element loop bodies shared by the serial and OpenMP kernels.

#pragma once

#include <cstddef>

#include "tal/kernels.hpp"

namespace tal::kernels::detail {

inline void forward_row(const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out,
                        std::size_t i) {
  const double* x = in.data.data() + i * in.cols;
  for (std::size_t o = 0; o < layer.weights.rows; ++o) {
    const double* w = layer.weights.data.data() + o * layer.weights.cols;
    double acc = layer.bias[o];
    for (std::size_t j = 0; j < layer.weights.cols; ++j) acc += w[j] * x[j];
    out(i, o) = (relu && acc < 0.0) ? 0.0 : acc;
  }
}

inline void weight_grad_row(const Matrix& delta, const Matrix& in, DenseLayer& grad,
                            std::size_t o) {
  double* gw = grad.weights.data.data() + o * grad.weights.cols;
  for (std::size_t j = 0; j < in.cols; ++j) gw[j] = 0.0;
  double gb = 0.0;
  for (std::size_t i = 0; i < delta.rows; ++i) {
    const double d = delta(i, o);
    if (d == 0.0) continue;
    const double* x = in.data.data() + i * in.cols;
    for (std::size_t j = 0; j < in.cols; ++j) gw[j] += d * x[j];
    gb += d;
  }
  grad.bias[o] = gb;
}

inline void input_grad_row(const Matrix& delta, const DenseLayer& layer, const Matrix& activation,
                           Matrix& delta_in, std::size_t i) {
  double* out = delta_in.data.data() + i * delta_in.cols;
  for (std::size_t j = 0; j < delta_in.cols; ++j) out[j] = 0.0;
  for (std::size_t o = 0; o < layer.weights.rows; ++o) {
    const double d = delta(i, o);
    if (d == 0.0) continue;
    const double* w = layer.weights.data.data() + o * layer.weights.cols;
    for (std::size_t j = 0; j < delta_in.cols; ++j) out[j] += d * w[j];
  }
  for (std::size_t j = 0; j < delta_in.cols; ++j) {
    if (!(activation(i, j) > 0.0)) out[j] = 0.0;
  }
}

}  // namespace tal::kernels::detail
