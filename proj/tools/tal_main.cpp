// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: tal {gen,train,eval,sweep} [options]

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tal/commands.hpp"
#include "tal/error.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> loss_mode;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<std::size_t> queue_capacity;
  std::optional<std::string> typicalness;
  std::optional<std::size_t> knn_k;
  std::optional<std::string> settings;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", f.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--loss-mode", f.loss_mode, "training objective")
      ->check(CLI::IsMember({"ce", "logitnorm", "fixed-t", "tal"}));
  cmd->add_option("--t-min", f.t_min, "magnitude for the most typical samples");
  cmd->add_option("--t-max", f.t_max, "magnitude for the least typical samples");
  cmd->add_option("--queue-capacity", f.queue_capacity, "feature queue length");
  cmd->add_option("--typicalness", f.typicalness, "distance to the feature queue")
      ->check(CLI::IsMember({"nearest", "knn"}));
  cmd->add_option("--knn-k", f.knn_k, "neighbours averaged by the knn measure");
  cmd->add_option("--settings", f.settings, "evaluation settings, comma separated");
  cmd->add_option("--out", f.out, "output directory");
}

tal::RunConfig resolve(const CommonFlags& f) {
  tal::RunConfig config =
      f.config_path.empty() ? tal::RunConfig() : tal::RunConfig::from_file(f.config_path);
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw tal::ConfigError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) config.set("seed", std::to_string(*f.seed));
  if (f.loss_mode) config.set("loss_mode", *f.loss_mode);
  if (f.t_min) config.set("t_min", tal::format_double(*f.t_min));
  if (f.t_max) config.set("t_max", tal::format_double(*f.t_max));
  if (f.queue_capacity) config.set("queue_capacity", std::to_string(*f.queue_capacity));
  if (f.typicalness) config.set("typicalness", *f.typicalness);
  if (f.knn_k) config.set("knn_k", std::to_string(*f.knn_k));
  if (f.settings) config.set("settings", *f.settings);
  if (f.out) config.set("out", *f.out);
  return config;
}

std::size_t sweep_parallelism() {
  const char* env = std::getenv("TAL_NUM_PARALLEL");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(env, &end, 10);
  if (*end != '\0' || n == 0) {
    throw tal::ConfigError(std::string("TAL_NUM_PARALLEL expects a positive integer, got '") + env +
                           "'");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typicalness-aware training and failure-detection evaluation"};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, eval_flags, sweep_flags;
  CLI::App* gen = app.add_subcommand("gen", "generate the synthetic benchmark");
  add_common(gen, gen_flags);

  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train, train_flags);
  std::string resume;
  std::optional<std::size_t> stop_after;
  train->add_option("--resume", resume, "continue from this checkpoint")->check(CLI::ExistingFile);
  train->add_option("--stop-after", stop_after, "stop after this many completed epochs");

  CLI::App* eval = app.add_subcommand("eval", "score the test set and report metrics");
  add_common(eval, eval_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "gen, train and eval over a parameter grid");
  add_common(sweep, sweep_flags);
  tal::SweepGrid grid;
  sweep->add_option("--grid-t-min", grid.t_min, "t_min values")->delimiter(',');
  sweep->add_option("--grid-t-max", grid.t_max, "t_max values")->delimiter(',');
  sweep->add_option("--grid-queue-capacity", grid.queue_capacity, "queue capacities")
      ->delimiter(',');
  sweep->add_option("--seeds", grid.seeds, "seeds per cell")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      tal::cmd_gen(resolve(gen_flags), std::cout);
    } else if (train->parsed()) {
      tal::TrainOptions options;
      if (!resume.empty()) options.resume_from = resume;
      options.stop_after = stop_after;
      tal::cmd_train(resolve(train_flags), options, std::cout);
    } else if (eval->parsed()) {
      tal::cmd_eval(resolve(eval_flags), std::cout);
    } else if (sweep->parsed()) {
      const tal::SweepOutcome outcome =
          tal::cmd_sweep(resolve(sweep_flags), grid, sweep_parallelism(), std::cout);
      if (outcome.failed_runs > 0) {
        std::cerr << "error: " << outcome.failed_runs << " of " << outcome.runs
                  << " sweep runs failed\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
