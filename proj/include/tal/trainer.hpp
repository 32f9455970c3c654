// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training loop and inference.
//
// Training runs in two phases. The first ceil(warmup_fraction * epochs)
// epochs use plain cross-entropy. In typicalness-aware mode, the end of the
// warmup triggers one pass over the training set that fills the feature
// queue from correctly predicted samples. Every later mini-batch then
//   1. runs the forward pass and summarizes each sample's features,
//   2. measures each sample's distance to the queue and min-max normalizes
//      the batch into typicalness values,
//   3. minimizes tau * LogitNorm(T(tau)) + (1 - tau) * CE, tau held constant,
//   4. pushes the correctly predicted samples of the batch into the queue.
// The learning rate follows a per-epoch cosine annealing schedule.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tal/core_math.hpp"
#include "tal/data.hpp"
#include "tal/metrics.hpp"
#include "tal/mlp.hpp"
#include "tal/scoring.hpp"
#include "tal/typicalness.hpp"

namespace tal {

enum class LossMode {
  kCe,         // cross-entropy
  kLogitNorm,  // LogitNorm at fixed_t
  kFixedT,     // 0.5 * LogitNorm(fixed_t) + 0.5 * CE
  kTal,        // typicalness-weighted dynamic magnitude + CE
};

std::string_view loss_mode_name(LossMode m);
LossMode parse_loss_mode(std::string_view name);

struct TrainingConfig {
  std::uint64_t seed = 0;
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double warmup_fraction = 0.05;
  MagnitudeSchedule sched;
  // Magnitude used by the logitnorm and fixed-t modes.
  double fixed_t = 10.0;
  std::size_t queue_capacity = HistoricalFeatureQueue::kDefaultCapacity;
  DistanceMeasure measure = DistanceMeasure::nearest();
  LossMode loss_mode = LossMode::kTal;
  std::vector<std::size_t> hidden = {64, 64};
  Backend backend = Backend::kParallel;

  // Throws ConfigError.
  void validate() const;
  std::size_t warmup_epochs() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  std::size_t queue_len = 0;
  // Mean typicalness over the epoch's typicalness-weighted batches.
  std::optional<double> mean_tau;
};

// Everything needed to continue training exactly where it stopped.
struct TrainingState {
  Mlp model;
  Mlp velocity;
  HistoricalFeatureQueue queue;
  std::uint32_t epoch = 0;  // completed epochs
  std::mt19937_64 rng;
};

// Design matrix and labels of a labelled dataset.
struct LabelledBatch {
  Matrix x;
  std::vector<std::size_t> labels;
};

LabelledBatch to_labelled(const Dataset& data, std::size_t n_classes);

TrainingState init_training(const TrainingConfig& config, std::size_t input_dim,
                            std::size_t n_classes);

struct StepResult {
  double loss = 0.0;           // batch-mean objective
  std::size_t correct = 0;     // pre-update predictions
  std::vector<double> tau;     // empty unless typicalness was used
};

// Per-sample objectives for one batch. Needs the queue only in
// typicalness-aware mode after warmup.
std::vector<SampleObjective> batch_objectives(const TrainingConfig& config, bool warmup,
                                              const HistoricalFeatureQueue& queue,
                                              std::span<const FeatureStats> stats,
                                              std::vector<double>* tau);

// One optimizer step on a mini-batch, including the queue update.
StepResult train_step(TrainingState& state, const TrainingConfig& config, const Matrix& x,
                      std::span<const std::size_t> labels, double lr);

// Fills the queue from one pass over the data and marks it initialized.
void initialize_queue(TrainingState& state, const TrainingConfig& config,
                      const LabelledBatch& data);

EpochLog train_epoch(TrainingState& state, const TrainingConfig& config,
                     const LabelledBatch& data);

// Runs epochs until `stop_after` (default: config.epochs) completed epochs.
std::vector<EpochLog> train(TrainingState& state, const TrainingConfig& config,
                            const LabelledBatch& data, std::optional<std::size_t> stop_after = {});

// One test sample with all confidence scores.
struct ScoredSample {
  std::string sample_id;
  std::optional<std::size_t> label;
  Domain domain = Domain::kId;
  std::size_t predicted = 0;
  bool correct = false;
  ConfidenceScores scores;
};

// Pure inference: no typicalness, no queue. Output order equals input order.
std::vector<ScoredSample> evaluate(const Mlp& model, const Dataset& test,
                                   Backend backend = Backend::kParallel);

std::vector<EvaluationRecord> records_for(const std::vector<ScoredSample>& scored, ScoreKind kind);

}  // namespace tal
