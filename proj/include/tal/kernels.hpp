// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops. `serial` is the reference implementation and
// `parallel` the OpenMP one. Both partition work so that every output element
// is produced by one thread with the same summation order, so the two agree
// bit for bit whatever the thread count.

#pragma once

#include <span>
#include <vector>

#include "tal/mlp.hpp"
#include "tal/scoring.hpp"
#include "tal/typicalness.hpp"

namespace tal::kernels {

namespace serial {

// out = act(in * W^T + b), one row per sample.
void dense_forward(const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out);
// dW = delta^T * in, db = column sums of delta (summed over rows in order).
void dense_weight_grad(const Matrix& delta, const Matrix& in, DenseLayer& grad);
// delta_in = (delta * W) masked by (activation > 0).
void dense_input_grad(const Matrix& delta, const DenseLayer& layer, const Matrix& activation,
                      Matrix& delta_in);
std::vector<double> queue_distances(std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure);
std::vector<FeatureStats> row_stats(const Matrix& features);
std::vector<ConfidenceScores> score_rows(const Matrix& logits);

}  // namespace serial

namespace parallel {

void dense_forward(const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out);
void dense_weight_grad(const Matrix& delta, const Matrix& in, DenseLayer& grad);
void dense_input_grad(const Matrix& delta, const DenseLayer& layer, const Matrix& activation,
                      Matrix& delta_in);
std::vector<double> queue_distances(std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure);
std::vector<FeatureStats> row_stats(const Matrix& features);
std::vector<ConfidenceScores> score_rows(const Matrix& logits);

}  // namespace parallel

// Runtime dispatch on Backend.
void dense_forward(Backend b, const Matrix& in, const DenseLayer& layer, bool relu, Matrix& out);
void dense_weight_grad(Backend b, const Matrix& delta, const Matrix& in, DenseLayer& grad);
void dense_input_grad(Backend b, const Matrix& delta, const DenseLayer& layer,
                      const Matrix& activation, Matrix& delta_in);
std::vector<double> queue_distances(Backend b, std::span<const FeatureStats> stats,
                                    const HistoricalFeatureQueue& queue,
                                    const DistanceMeasure& measure);
std::vector<FeatureStats> row_stats(Backend b, const Matrix& features);
std::vector<ConfidenceScores> score_rows(Backend b, const Matrix& logits);

}  // namespace tal::kernels
