// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tal/error.hpp"

namespace tal {

namespace {

void check_finite(std::span<const double> logits) {
  if (logits.empty()) throw InvalidInputError("empty logit vector");
  for (double v : logits) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite logit");
  }
}

void check_label(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
}

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInputError("typicalness outside [0, 1]");
}

double l2_norm(std::span<const double> v) {
  // Scaled accumulation so huge logits do not overflow the sum of squares.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : v) {
    const double r = x / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

// -log softmax(logits)[label], written as (max - f_y) + log1p(sum of the
// non-maximal exponentials) so saturated losses keep full relative precision.
double stable_cross_entropy(std::span<const double> logits, std::size_t label) {
  const std::size_t top = argmax(logits);
  const double m = logits[top];
  double tail = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i != top) tail += std::exp(logits[i] - m);
  }
  return (m - logits[label]) + std::log1p(tail);
}

// softmax - onehot(label); the label entry is formed as minus the sum of the
// other probabilities to avoid cancellation in p_y - 1.
void cross_entropy_grad_into(std::span<const double> logits, std::size_t label,
                             double weight, std::span<double> out) {
  const double m = logits[argmax(logits)];
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += std::exp(logits[i] - m);
  double others = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i == label) continue;
    const double p = std::exp(logits[i] - m) / z;
    others += p;
    out[i] += weight * p;
  }
  out[label] -= weight * others;
}

}  // namespace

Vector LogitDecomposition::reconstruct() const {
  Vector out(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) out[i] = magnitude * direction[i];
  return out;
}

void MagnitudeSchedule::validate() const {
  if (!(std::isfinite(t_min) && std::isfinite(t_max) && t_min > 0.0 && t_max >= t_min)) {
    throw InvalidInputError("magnitude schedule requires 0 < t_min <= t_max, got t_min=" +
                            std::to_string(t_min) + " t_max=" + std::to_string(t_max));
  }
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double log_sum_exp(std::span<const double> logits) {
  check_finite(logits);
  const double m = logits[argmax(logits)];
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - m);
  return m + std::log(sum);
}

Vector softmax(std::span<const double> logits) {
  check_finite(logits);
  const double m = logits[argmax(logits)];
  Vector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  check_finite(logits);
  check_label(logits, label);
  return stable_cross_entropy(logits, label);
}

LogitDecomposition decompose(std::span<const double> logits) {
  check_finite(logits);
  const double norm = l2_norm(logits);
  if (norm == 0.0) throw DegenerateLogitsError();
  LogitDecomposition out;
  out.magnitude = norm;
  out.direction.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out.direction[i] = logits[i] / norm;
  return out;
}

double logitnorm_loss(std::span<const double> logits, std::size_t label, double t) {
  if (!(t > 0.0 && std::isfinite(t))) throw InvalidInputError("magnitude must be positive");
  check_label(logits, label);
  Vector scaled = decompose(logits).direction;
  for (double& v : scaled) v *= t;
  return stable_cross_entropy(scaled, label);
}

double dynamic_magnitude(double tau, const MagnitudeSchedule& sched) {
  check_tau(tau);
  sched.validate();
  return sched.t_min + (1.0 - tau) * (sched.t_max - sched.t_min);
}

double tal_loss(std::span<const double> logits, std::size_t label, double tau,
                const MagnitudeSchedule& sched) {
  return logitnorm_loss(logits, label, dynamic_magnitude(tau, sched));
}

SampleObjective combined_objective(double tau, const MagnitudeSchedule& sched) {
  return SampleObjective{tau, dynamic_magnitude(tau, sched), 1.0 - tau};
}

double combined_loss(std::span<const double> logits, std::size_t label, double tau,
                     const MagnitudeSchedule& sched) {
  return objective_loss(logits, label, combined_objective(tau, sched));
}

double objective_loss(std::span<const double> logits, std::size_t label,
                      const SampleObjective& objective) {
  double loss = 0.0;
  if (objective.direction_weight != 0.0) {
    loss += objective.direction_weight * logitnorm_loss(logits, label, objective.magnitude);
  }
  if (objective.ce_weight != 0.0) loss += objective.ce_weight * cross_entropy(logits, label);
  return loss;
}

Vector grad_cross_entropy(std::span<const double> logits, std::size_t label) {
  check_finite(logits);
  check_label(logits, label);
  Vector grad(logits.size(), 0.0);
  cross_entropy_grad_into(logits, label, 1.0, grad);
  return grad;
}

Vector grad_logitnorm_loss(std::span<const double> logits, std::size_t label, double t) {
  Vector grad(logits.size(), 0.0);
  objective_loss_and_grad(logits, label, SampleObjective{1.0, t, 0.0}, grad);
  return grad;
}

Vector grad_tal_loss(std::span<const double> logits, std::size_t label, double tau,
                     const MagnitudeSchedule& sched) {
  return grad_logitnorm_loss(logits, label, dynamic_magnitude(tau, sched));
}

Vector grad_combined_loss(std::span<const double> logits, std::size_t label, double tau,
                          const MagnitudeSchedule& sched) {
  Vector grad(logits.size(), 0.0);
  objective_loss_and_grad(logits, label, combined_objective(tau, sched), grad);
  return grad;
}

double objective_loss_and_grad(std::span<const double> logits, std::size_t label,
                               const SampleObjective& objective, std::span<double> grad) {
  check_finite(logits);
  check_label(logits, label);
  if (grad.size() != logits.size()) throw InvalidInputError("gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;

  if (objective.direction_weight != 0.0) {
    const double t = objective.magnitude;
    if (!(t > 0.0 && std::isfinite(t))) throw InvalidInputError("magnitude must be positive");
    const LogitDecomposition dec = decompose(logits);
    Vector scaled(dec.direction);
    for (double& v : scaled) v *= t;
    loss += objective.direction_weight * stable_cross_entropy(scaled, label);

    // d/df CE(t f/|f|) = (t/|f|) (I - d d^T) g, with g the CE gradient at t d.
    Vector g(logits.size(), 0.0);
    cross_entropy_grad_into(scaled, label, 1.0, g);
    double radial = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) radial += dec.direction[i] * g[i];
    const double factor = objective.direction_weight * t / dec.magnitude;
    for (std::size_t i = 0; i < g.size(); ++i) {
      grad[i] += factor * (g[i] - radial * dec.direction[i]);
    }
  }
  if (objective.ce_weight != 0.0) {
    loss += objective.ce_weight * stable_cross_entropy(logits, label);
    cross_entropy_grad_into(logits, label, objective.ce_weight, grad);
  }
  return loss;
}

}  // namespace tal
