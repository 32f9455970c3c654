// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Loops that may throw (feature_stats, confidence_scores) validate up front
// or capture the first exception, since nothing may escape an OpenMP region.

#include <exception>

#include "kernel_bodies.hpp"
#include "tal/error.hpp"

namespace tal::kernels::parallel {

namespace {

template <typename Body>
void parallel_rows(std::size_t n, Body body) {
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tal_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void dense_forward(const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out) {
  if (in.cols != layer.in_dim()) throw InvalidInputError("dense_forward: input width mismatch");
  out = Matrix(in.rows, layer.out_dim());
  const auto rows = static_cast<long long>(in.rows);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    detail::forward_row(in, layer, relu, out, static_cast<std::size_t>(i));
  }
}

void dense_weight_grad(const Matrix& delta, const Matrix& in, DenseLayer& grad) {
  grad.weights = Matrix(delta.cols, in.cols);
  grad.bias.assign(delta.cols, 0.0);
  const auto outs = static_cast<long long>(delta.cols);
#pragma omp parallel for schedule(static)
  for (long long o = 0; o < outs; ++o) {
    detail::weight_grad_row(delta, in, grad, static_cast<std::size_t>(o));
  }
}

void dense_input_grad(const Matrix& delta, const DenseLayer& layer, const Matrix& activation,
                      Matrix& delta_in) {
  delta_in = Matrix(delta.rows, layer.in_dim());
  const auto rows = static_cast<long long>(delta.rows);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    detail::input_grad_row(delta, layer, activation, delta_in, static_cast<std::size_t>(i));
  }
}

std::vector<double> queue_distances(std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure) {
  queue.require_ready();
  std::vector<double> out(stats.size());
  parallel_rows(stats.size(),
                [&](std::size_t i) { out[i] = distance_to_queue(stats[i], queue, measure); });
  return out;
}

std::vector<FeatureStats> row_stats(const Matrix& features) {
  std::vector<FeatureStats> out(features.rows);
  parallel_rows(features.rows, [&](std::size_t i) { out[i] = feature_stats(features.row(i)); });
  return out;
}

std::vector<ConfidenceScores> score_rows(const Matrix& logits) {
  std::vector<ConfidenceScores> out(logits.rows);
  parallel_rows(logits.rows, [&](std::size_t i) { out[i] = confidence_scores(logits.row(i)); });
  return out;
}

}  // namespace tal::kernels::parallel
