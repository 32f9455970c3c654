// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Slow, independent reference implementations used to check the library.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "tal/core_math.hpp"
#include "tal/metrics.hpp"
#include "tal/mlp.hpp"

namespace tal::oracle {

// Fraction of (positive, negative) pairs ranked correctly, ties count half.
double auroc_pairwise(const BinaryScoredSet& set);

// Mean selective risk over every coverage k/N, k = 1..N. Items are ranked by
// descending score, earlier items first among equal scores.
double aurc_prefix(const BinaryScoredSet& set);
double eaurc_prefix(const BinaryScoredSet& set);

// Step-wise precision-recall area from a scan of every distinct threshold.
double aupr_bruteforce(const BinaryScoredSet& set, PrPolarity polarity);

// Random set of up to `max_n` items with at least one item of each class.
// Scores come from a small integer grid so that ties are common.
BinaryScoredSet random_set(std::mt19937_64& rng, std::size_t max_n);

// Central finite-difference gradient of `f` at `x`.
Vector numeric_gradient(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> x, double h);

// |a - n| / max(|a|, |n|) in the Euclidean norm; plain |a - n| when both are
// below `floor`.
double relative_error(std::span<const double> analytic, std::span<const double> numeric,
                      double floor = 1e-8);

// Mean objective over the batch, and its analytic parameter gradient
// flattened in parameter_pointers() order.
double mlp_batch_loss(const Mlp& model, const Matrix& x, std::span<const std::size_t> labels,
                      std::span<const SampleObjective> objectives);
Vector mlp_batch_gradient(const Mlp& model, const Matrix& x, std::span<const std::size_t> labels,
                          std::span<const SampleObjective> objectives);

}  // namespace tal::oracle
