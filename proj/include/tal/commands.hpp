// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// The gen / train / eval / sweep pipeline behind the `tal` command-line tool.
// All artifacts land in the configured output directory; none carries a
// timestamp, so identical inputs give byte-identical outputs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tal/run_config.hpp"
#include "tal/trainer.hpp"

namespace tal {

// Writes train.csv, test.csv and gen.resolved.cfg.
void cmd_gen(const RunConfig& config, std::ostream& log);

struct TrainOptions {
  std::optional<std::filesystem::path> resume_from;
  // Stop (and checkpoint) after this many completed epochs.
  std::optional<std::size_t> stop_after;
};

// Writes checkpoint.bin, epoch_log.csv and train.resolved.cfg.
void cmd_train(const RunConfig& config, const TrainOptions& options, std::ostream& log);

// Flat `key = value` metrics report, in report order.
using MetricsReport = std::vector<std::pair<std::string, double>>;

// Writes scores.csv, metrics.txt, calibration.txt, one
// rc_<setting>_<score>.csv per pair and eval.resolved.cfg.
MetricsReport cmd_eval(const RunConfig& config, std::ostream& log);

MetricsReport build_report(const std::vector<ScoredSample>& scored,
                           const std::vector<Setting>& settings);
std::string format_report(const MetricsReport& report);
std::string format_scores_csv(const std::vector<ScoredSample>& scored);
std::string format_epoch_log(const std::vector<EpochLog>& logs, bool with_tau);

struct SweepGrid {
  std::vector<double> t_min;
  std::vector<double> t_max;
  std::vector<std::size_t> queue_capacity;
  std::vector<std::uint64_t> seeds;
};

struct SweepOutcome {
  std::size_t cells = 0;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
};

// Runs gen -> train -> eval per (cell, seed) under <out>/cell<i>_seed<s>/
// and writes <out>/sweep.csv. Empty grid axes fall back to the config value.
// `parallel` bounds how many runs execute at once.
SweepOutcome cmd_sweep(const RunConfig& config, const SweepGrid& grid, std::size_t parallel,
                       std::ostream& log);

// Writes `contents` to `path` through a temporary file and a rename, so a
// failed command never leaves a half-written artifact behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tal
