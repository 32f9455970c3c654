// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "kernel_bodies.hpp"
#include "tal/error.hpp"

namespace tal::kernels::serial {

void dense_forward(const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out) {
  if (in.cols != layer.in_dim()) throw InvalidInputError("dense_forward: input width mismatch");
  out = Matrix(in.rows, layer.out_dim());
  for (std::size_t i = 0; i < in.rows; ++i) detail::forward_row(in, layer, relu, out, i);
}

void dense_weight_grad(const Matrix& delta, const Matrix& in, DenseLayer& grad) {
  grad.weights = Matrix(delta.cols, in.cols);
  grad.bias.assign(delta.cols, 0.0);
  for (std::size_t o = 0; o < delta.cols; ++o) detail::weight_grad_row(delta, in, grad, o);
}

void dense_input_grad(const Matrix& delta, const DenseLayer& layer, const Matrix& activation,
                      Matrix& delta_in) {
  delta_in = Matrix(delta.rows, layer.in_dim());
  for (std::size_t i = 0; i < delta.rows; ++i) {
    detail::input_grad_row(delta, layer, activation, delta_in, i);
  }
}

std::vector<double> queue_distances(std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure) {
  queue.require_ready();
  std::vector<double> out(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) out[i] = distance_to_queue(stats[i], queue, measure);
  return out;
}

std::vector<FeatureStats> row_stats(const Matrix& features) {
  std::vector<FeatureStats> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) out[i] = feature_stats(features.row(i));
  return out;
}

std::vector<ConfidenceScores> score_rows(const Matrix& logits) {
  std::vector<ConfidenceScores> out(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) out[i] = confidence_scores(logits.row(i));
  return out;
}

}  // namespace tal::kernels::serial

namespace tal::kernels {

void dense_forward(Backend b, const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out) {
  b == Backend::kSerial ? serial::dense_forward(in, layer, relu, out)
                        : parallel::dense_forward(in, layer, relu, out);
}

void dense_weight_grad(Backend b, const Matrix& delta, const Matrix& in, DenseLayer& grad) {
  b == Backend::kSerial ? serial::dense_weight_grad(delta, in, grad)
                        : parallel::dense_weight_grad(delta, in, grad);
}

void dense_input_grad(Backend b, const Matrix& delta, const DenseLayer& layer,
                      const Matrix& activation, Matrix& delta_in) {
  b == Backend::kSerial ? serial::dense_input_grad(delta, layer, activation, delta_in)
                        : parallel::dense_input_grad(delta, layer, activation, delta_in);
}

std::vector<double> queue_distances(Backend b, std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure) {
  return b == Backend::kSerial ? serial::queue_distances(stats, queue, measure)
                               : parallel::queue_distances(stats, queue, measure);
}

std::vector<FeatureStats> row_stats(Backend b, const Matrix& features) {
  return b == Backend::kSerial ? serial::row_stats(features) : parallel::row_stats(features);
}

std::vector<ConfidenceScores> score_rows(Backend b, const Matrix& logits) {
  return b == Backend::kSerial ? serial::score_rows(logits) : parallel::score_rows(logits);
}

}  // namespace tal::kernels
