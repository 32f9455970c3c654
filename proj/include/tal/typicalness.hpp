// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Historical Feature Queue and the per-batch typicalness estimate.
//
// Each training sample is summarized by the mean and population variance of
// its feature channels. The queue keeps those summaries for correctly
// predicted samples (FIFO, bounded). A sample's distance to the queue is the
// distance to its nearest entry (or the mean of its k nearest), and
// typicalness is that distance min-max normalized within the batch and
// flipped, so the closest sample of a batch gets 1 and the farthest gets 0.

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace tal {

struct FeatureStats {
  double mean = 0.0;
  double variance = 0.0;

  bool operator==(const FeatureStats&) const = default;
};

FeatureStats feature_stats(std::span<const double> features);

// L2 distance on (mean, standard deviation) pairs. For 1-D Gaussians this is
// also the 2-Wasserstein distance.
double stat_distance(const FeatureStats& a, const FeatureStats& b);

struct DistanceMeasure {
  enum class Kind { kNearest, kKnn };
  Kind kind = Kind::kNearest;
  std::size_t k = 10;

  static DistanceMeasure nearest() { return {Kind::kNearest, 1}; }
  static DistanceMeasure knn(std::size_t k) { return {Kind::kKnn, k}; }
};

class HistoricalFeatureQueue {
 public:
  static constexpr std::size_t kDefaultCapacity = 2000;

  explicit HistoricalFeatureQueue(std::size_t capacity = kDefaultCapacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool initialized() const { return initialized_; }
  void mark_initialized() { initialized_ = true; }

  // Oldest first.
  const std::deque<FeatureStats>& entries() const { return entries_; }

  // Appends, evicting the oldest entry when full.
  void push(const FeatureStats& stats);

  // Appends exactly the stats whose mask entry is true, in batch order.
  void push_correct(std::span<const FeatureStats> batch_stats, std::span<const bool> correct_mask);

  // Throws QueueNotReadyError when the queue is empty or not yet initialized.
  void require_ready() const;

  void clear();

 private:
  std::size_t capacity_;
  std::deque<FeatureStats> entries_;
  bool initialized_ = false;
};

double distance_to_queue(const FeatureStats& stats, const HistoricalFeatureQueue& queue,
                         const DistanceMeasure& measure);

struct BatchDistances {
  std::vector<double> distances;
  double d_min = 0.0;
  double d_max = 0.0;

  static BatchDistances from(std::vector<double> distances);
};

// 1 - (d - d_min) / (d_max - d_min); all ones when the batch has no spread.
std::vector<double> batch_typicalness(const BatchDistances& batch);

}  // namespace tal
