// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Numeric kernels on a single logit vector: softmax, cross-entropy, the
// direction/magnitude split, the normalized-logit losses and their gradients.
// Everything here is a pure function of its arguments.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tal {

using Vector = std::vector<double>;

// Logits split into a unit direction and a non-negative Euclidean norm.
struct LogitDecomposition {
  Vector direction;
  double magnitude = 0.0;

  Vector reconstruct() const;
};

// Bounds of the typicalness-driven logit magnitude. Typical samples get
// t_min, the least typical sample of a batch gets t_max.
struct MagnitudeSchedule {
  double t_min = 10.0;
  double t_max = 100.0;

  // Throws InvalidInputError unless 0 < t_min <= t_max (both finite).
  void validate() const;
};

// Per-sample mix of a normalized-logit term and a plain cross-entropy term:
//   loss = direction_weight * CE(t * f/|f|, y) + ce_weight * CE(f, y).
// Every training objective (CE, LogitNorm, fixed-T, typicalness-aware) is an
// instance of this.
struct SampleObjective {
  double direction_weight = 0.0;
  double magnitude = 1.0;
  double ce_weight = 1.0;
};

Vector softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> logits);

double cross_entropy(std::span<const double> logits, std::size_t label);

LogitDecomposition decompose(std::span<const double> logits);

double logitnorm_loss(std::span<const double> logits, std::size_t label, double t);

double dynamic_magnitude(double tau, const MagnitudeSchedule& sched);

double tal_loss(std::span<const double> logits, std::size_t label, double tau,
                const MagnitudeSchedule& sched);

// tau * tal_loss + (1 - tau) * cross_entropy.
double combined_loss(std::span<const double> logits, std::size_t label, double tau,
                     const MagnitudeSchedule& sched);

// Objective used by combined_loss for a given typicalness.
SampleObjective combined_objective(double tau, const MagnitudeSchedule& sched);

double objective_loss(std::span<const double> logits, std::size_t label,
                      const SampleObjective& objective);

// Gradients with respect to the logits.
Vector grad_cross_entropy(std::span<const double> logits, std::size_t label);
Vector grad_logitnorm_loss(std::span<const double> logits, std::size_t label, double t);
Vector grad_tal_loss(std::span<const double> logits, std::size_t label, double tau,
                     const MagnitudeSchedule& sched);
// tau is a constant here: nothing flows back into the typicalness estimate.
Vector grad_combined_loss(std::span<const double> logits, std::size_t label, double tau,
                          const MagnitudeSchedule& sched);

// Loss and gradient in one pass; the training loop's entry point.
double objective_loss_and_grad(std::span<const double> logits, std::size_t label,
                               const SampleObjective& objective, std::span<double> grad);

// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

}  // namespace tal
