// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/typicalness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tal/error.hpp"

namespace tal {

FeatureStats feature_stats(std::span<const double> features) {
  if (features.size() < 2) throw InvalidInputError("feature statistics need at least 2 channels");
  double sum = 0.0;
  for (double v : features) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite feature value");
    sum += v;
  }
  const double n = static_cast<double>(features.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : features) sq += (v - mean) * (v - mean);
  return FeatureStats{mean, sq / n};
}

double stat_distance(const FeatureStats& a, const FeatureStats& b) {
  const double dm = a.mean - b.mean;
  const double ds = std::sqrt(a.variance) - std::sqrt(b.variance);
  return std::hypot(dm, ds);
}

HistoricalFeatureQueue::HistoricalFeatureQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInputError("queue capacity must be positive");
}

void HistoricalFeatureQueue::push(const FeatureStats& stats) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(stats);
}

void HistoricalFeatureQueue::push_correct(std::span<const FeatureStats> batch_stats,
                                          std::span<const bool> correct_mask) {
  if (batch_stats.size() != correct_mask.size()) {
    throw InvalidInputError("batch stats and correctness mask differ in length");
  }
  for (std::size_t i = 0; i < batch_stats.size(); ++i) {
    if (correct_mask[i]) push(batch_stats[i]);
  }
}

void HistoricalFeatureQueue::require_ready() const {
  if (!initialized_) throw QueueNotReadyError("feature queue has not been initialized");
  if (entries_.empty()) throw QueueNotReadyError("feature queue is empty");
}

void HistoricalFeatureQueue::clear() {
  entries_.clear();
  initialized_ = false;
}

double distance_to_queue(const FeatureStats& stats, const HistoricalFeatureQueue& queue,
                         const DistanceMeasure& measure) {
  queue.require_ready();
  if (measure.kind == DistanceMeasure::Kind::kNearest) {
    double best = std::numeric_limits<double>::infinity();
    for (const FeatureStats& e : queue.entries()) best = std::min(best, stat_distance(stats, e));
    return best;
  }
  if (measure.k == 0) throw InvalidInputError("knn typicalness needs k >= 1");
  std::vector<double> d;
  d.reserve(queue.size());
  for (const FeatureStats& e : queue.entries()) d.push_back(stat_distance(stats, e));
  const std::size_t k = std::min(measure.k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += d[i];
  return sum / static_cast<double>(k);
}

BatchDistances BatchDistances::from(std::vector<double> distances) {
  if (distances.empty()) throw InvalidInputError("empty batch");
  BatchDistances out;
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  out.d_min = *lo;
  out.d_max = *hi;
  out.distances = std::move(distances);
  return out;
}

std::vector<double> batch_typicalness(const BatchDistances& batch) {
  std::vector<double> tau(batch.distances.size(), 1.0);
  const double span = batch.d_max - batch.d_min;
  if (!(span > 0.0)) return tau;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double t = 1.0 - (batch.distances[i] - batch.d_min) / span;
    tau[i] = std::clamp(t, 0.0, 1.0);
  }
  return tau;
}

}  // namespace tal
