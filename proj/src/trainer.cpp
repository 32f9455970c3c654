// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "tal/error.hpp"
#include "tal/kernels.hpp"

namespace tal {

namespace {

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), x.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>(rows[i] * x.cols), x.cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(i * x.cols));
  }
  return out;
}

bool is_warmup(const TrainingState& state, const TrainingConfig& config) {
  return state.epoch < config.warmup_epochs();
}

}  // namespace

std::string_view loss_mode_name(LossMode m) {
  switch (m) {
    case LossMode::kCe: return "ce";
    case LossMode::kLogitNorm: return "logitnorm";
    case LossMode::kFixedT: return "fixed-t";
    case LossMode::kTal: return "tal";
  }
  return "?";
}

LossMode parse_loss_mode(std::string_view name) {
  if (name == "ce") return LossMode::kCe;
  if (name == "logitnorm") return LossMode::kLogitNorm;
  if (name == "fixed-t" || name == "fixed_t") return LossMode::kFixedT;
  if (name == "tal") return LossMode::kTal;
  throw ConfigError("unknown loss mode '" + std::string(name) + "'");
}

void TrainingConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("warmup_fraction must be in [0, 1)");
  }
  try {
    sched.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  if (!(fixed_t > 0.0)) throw ConfigError("fixed_t must be positive");
  if (queue_capacity == 0) throw ConfigError("queue_capacity must be positive");
  if (measure.kind == DistanceMeasure::Kind::kKnn && measure.k == 0) {
    throw ConfigError("knn_k must be positive");
  }
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
  for (std::size_t h : hidden) {
    if (h < 2) throw ConfigError("hidden layers need at least 2 units for feature statistics");
  }
  if (loss_mode == LossMode::kTal && warmup_epochs() < 1) {
    throw ConfigError("typicalness-aware training needs warmup_fraction * epochs >= 1");
  }
}

std::size_t TrainingConfig::warmup_epochs() const {
  const double w = std::ceil(warmup_fraction * static_cast<double>(epochs) - 1e-9);
  return std::min(epochs, static_cast<std::size_t>(std::max(0.0, w)));
}

LabelledBatch to_labelled(const Dataset& data, std::size_t n_classes) {
  LabelledBatch out;
  out.x = Matrix(data.size(), data.feature_dim);
  out.labels.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    if (!s.label) throw InvalidInputError("training sample '" + s.id + "' has no label");
    if (*s.label >= n_classes) {
      throw InvalidInputError("training sample '" + s.id + "' has label " +
                              std::to_string(*s.label) + " >= n_classes");
    }
    if (s.x.size() != data.feature_dim) throw InvalidInputError("ragged dataset");
    std::copy(s.x.begin(), s.x.end(), out.x.row(i).begin());
    out.labels.push_back(*s.label);
  }
  if (out.labels.empty()) throw InvalidInputError("empty training set");
  return out;
}

TrainingState init_training(const TrainingConfig& config, std::size_t input_dim,
                            std::size_t n_classes) {
  config.validate();
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(n_classes);
  TrainingState state{Mlp(dims), Mlp(dims), HistoricalFeatureQueue(config.queue_capacity), 0,
                      std::mt19937_64(config.seed)};
  state.model = Mlp::random(dims, state.rng);
  return state;
}

std::vector<SampleObjective> batch_objectives(const TrainingConfig& config, bool warmup,
                                              const HistoricalFeatureQueue& queue,
                                              std::span<const FeatureStats> stats,
                                              std::vector<double>* tau) {
  const std::size_t n = stats.size();
  const SampleObjective ce{0.0, 1.0, 1.0};
  if (warmup) return std::vector<SampleObjective>(n, ce);
  switch (config.loss_mode) {
    case LossMode::kCe:
      return std::vector<SampleObjective>(n, ce);
    case LossMode::kLogitNorm:
      return std::vector<SampleObjective>(n, SampleObjective{1.0, config.fixed_t, 0.0});
    case LossMode::kFixedT:
      return std::vector<SampleObjective>(n, SampleObjective{0.5, config.fixed_t, 0.5});
    case LossMode::kTal:
      break;
  }
  if (!queue.initialized()) {
    throw ConfigError("typicalness-aware training reached its main phase without a feature queue");
  }
  const std::vector<double> t = batch_typicalness(
      BatchDistances::from(kernels::queue_distances(config.backend, stats, queue, config.measure)));
  std::vector<SampleObjective> out;
  out.reserve(n);
  for (double ti : t) out.push_back(combined_objective(ti, config.sched));
  if (tau) *tau = t;
  return out;
}

StepResult train_step(TrainingState& state, const TrainingConfig& config, const Matrix& x,
                      std::span<const std::size_t> labels, double lr) {
  if (x.rows != labels.size() || x.rows == 0) throw InvalidInputError("bad mini-batch shape");
  const BatchTrace trace = state.model.forward_batch(x, config.backend);
  const Matrix& logits = trace.logits();
  const bool warmup = is_warmup(state, config);
  const bool typicalness = config.loss_mode == LossMode::kTal && !warmup;

  std::vector<FeatureStats> stats;
  if (typicalness) stats = kernels::row_stats(config.backend, trace.features());
  StepResult result;
  const std::vector<SampleObjective> objectives =
      typicalness ? batch_objectives(config, warmup, state.queue, stats, &result.tau)
                  : batch_objectives(config, warmup, state.queue,
                                     std::vector<FeatureStats>(x.rows), nullptr);

  const double inv_n = 1.0 / static_cast<double>(x.rows);
  Matrix grad_logits(logits.rows, logits.cols);
  auto correct = std::make_unique<bool[]>(x.rows);
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::span<double> g = grad_logits.row(i);
    loss_sum += objective_loss_and_grad(logits.row(i), labels[i], objectives[i], g);
    for (double& v : g) v *= inv_n;
    correct[i] = argmax(logits.row(i)) == labels[i];
    if (correct[i]) ++result.correct;
  }
  result.loss = loss_sum * inv_n;

  Mlp grads;
  state.model.backward_batch(trace, grad_logits, grads, config.backend);
  sgd_step(state.model, state.velocity, grads, lr, config.momentum, config.weight_decay);

  if (typicalness) {
    state.queue.push_correct(stats, std::span<const bool>(correct.get(), x.rows));
  }
  return result;
}

void initialize_queue(TrainingState& state, const TrainingConfig& config,
                      const LabelledBatch& data) {
  state.queue.clear();
  const std::size_t n = data.labels.size();
  for (std::size_t start = 0; start < n; start += config.batch_size) {
    const std::size_t end = std::min(n, start + config.batch_size);
    std::vector<std::size_t> rows(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const BatchTrace trace = state.model.forward_batch(gather_rows(data.x, rows), config.backend);
    const std::vector<FeatureStats> stats = kernels::row_stats(config.backend, trace.features());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (argmax(trace.logits().row(i)) == data.labels[rows[i]]) state.queue.push(stats[i]);
    }
  }
  state.queue.mark_initialized();
}

EpochLog train_epoch(TrainingState& state, const TrainingConfig& config,
                     const LabelledBatch& data) {
  const std::size_t n = data.labels.size();
  if (n == 0) throw InvalidInputError("empty training set");
  if (data.x.cols != state.model.input_dim()) {
    throw InvalidInputError("training data width does not match the network input");
  }
  EpochLog log;
  log.epoch = state.epoch + 1;
  log.lr = cosine_annealed_lr(config.learning_rate, state.epoch, config.epochs);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), state.rng);

  double loss_sum = 0.0;
  std::size_t correct = 0;
  double tau_sum = 0.0;
  std::size_t tau_count = 0;
  for (std::size_t start = 0; start < n; start += config.batch_size) {
    const std::size_t end = std::min(n, start + config.batch_size);
    const std::span<const std::size_t> rows(order.data() + start, end - start);
    std::vector<std::size_t> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = data.labels[rows[i]];
    const StepResult step = train_step(state, config, gather_rows(data.x, rows), labels, log.lr);
    loss_sum += step.loss * static_cast<double>(rows.size());
    correct += step.correct;
    for (double t : step.tau) tau_sum += t;
    tau_count += step.tau.size();
  }
  ++state.epoch;
  if (config.loss_mode == LossMode::kTal && state.epoch == config.warmup_epochs()) {
    initialize_queue(state, config, data);
  }

  log.train_loss = loss_sum / static_cast<double>(n);
  log.train_acc = static_cast<double>(correct) / static_cast<double>(n);
  log.queue_len = state.queue.size();
  if (tau_count > 0) log.mean_tau = tau_sum / static_cast<double>(tau_count);
  return log;
}

std::vector<EpochLog> train(TrainingState& state, const TrainingConfig& config,
                            const LabelledBatch& data, std::optional<std::size_t> stop_after) {
  config.validate();
  const std::size_t stop = std::min(config.epochs, stop_after.value_or(config.epochs));
  std::vector<EpochLog> logs;
  while (state.epoch < stop) logs.push_back(train_epoch(state, config, data));
  return logs;
}

std::vector<ScoredSample> evaluate(const Mlp& model, const Dataset& test, Backend backend) {
  if (test.feature_dim != model.input_dim()) {
    throw InvalidInputError("test data has " + std::to_string(test.feature_dim) +
                            " features, checkpoint expects " + std::to_string(model.input_dim()));
  }
  Matrix x(test.size(), test.feature_dim);
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.samples[i].x.size() != test.feature_dim) throw InvalidInputError("ragged dataset");
    std::copy(test.samples[i].x.begin(), test.samples[i].x.end(), x.row(i).begin());
  }
  const BatchTrace trace = model.forward_batch(x, backend);
  std::vector<ConfidenceScores> scores = kernels::score_rows(backend, trace.logits());

  std::vector<ScoredSample> out(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Sample& s = test.samples[i];
    ScoredSample& r = out[i];
    r.sample_id = s.id;
    r.label = s.label;
    r.domain = s.domain;
    r.scores = scores[i];
    r.predicted = scores[i].predicted;
    r.correct = s.domain != Domain::kSemantic && s.label && *s.label == r.predicted;
  }
  return out;
}

std::vector<EvaluationRecord> records_for(const std::vector<ScoredSample>& scored,
                                          ScoreKind kind) {
  std::vector<EvaluationRecord> out;
  out.reserve(scored.size());
  for (const ScoredSample& s : scored) {
    out.push_back(EvaluationRecord{s.sample_id, s.scores.get(kind), s.predicted, s.label,
                                   s.domain, s.correct});
  }
  return out;
}

}  // namespace tal
