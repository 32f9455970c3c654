// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/run_config.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "tal/error.hpp"

namespace tal {
namespace {

std::string config_error(const std::string& text) {
  try {
    RunConfig::from_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfig, Defaults) {
  const RunConfig c;
  const TrainingConfig t = c.training_config();
  EXPECT_EQ(t.loss_mode, LossMode::kTal);
  EXPECT_EQ(t.sched.t_min, 10.0);
  EXPECT_EQ(t.sched.t_max, 100.0);
  EXPECT_EQ(t.queue_capacity, 2000u);
  EXPECT_EQ(t.warmup_fraction, 0.05);
  EXPECT_EQ(t.measure.kind, DistanceMeasure::Kind::kNearest);
  EXPECT_EQ(c.ece_bins(), 15u);
  EXPECT_EQ(c.settings(), (std::vector<Setting>{Setting::kOldFd, Setting::kOodD, Setting::kNewFd}));
  EXPECT_EQ(c.train_csv(), std::filesystem::path("run") / "train.csv");
}

TEST(RunConfig, ParsesValuesAndComments) {
  const RunConfig c = RunConfig::from_text(
      "# header comment\n"
      "\n"
      "  loss_mode = ce   # trailing\n"
      "t_min=5\n"
      "hidden = 32, 16\n"
      "typicalness = knn\n"
      "knn_k = 7\n");
  const TrainingConfig t = c.training_config();
  EXPECT_EQ(t.loss_mode, LossMode::kCe);
  EXPECT_EQ(t.sched.t_min, 5.0);
  EXPECT_EQ(t.hidden, (std::vector<std::size_t>{32, 16}));
  EXPECT_EQ(t.measure.kind, DistanceMeasure::Kind::kKnn);
  EXPECT_EQ(t.measure.k, 7u);
}

TEST(RunConfig, UnknownKeyNamesKeyAndLine) {
  const std::string msg = config_error("seed = 1\n\nlearning_rat = 0.2\n");
  EXPECT_NE(msg.find("learning_rat"), std::string::npos);
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(RunConfig, MalformedLine) {
  EXPECT_NE(config_error("seed 1\n").find("line 1"), std::string::npos);
}

TEST(RunConfig, ResolvedTextRoundTrips) {
  RunConfig c = RunConfig::from_text("epochs = 12\nsettings = new_fd\nout = somewhere\n");
  const std::string text = c.resolved_text();
  const RunConfig back = RunConfig::from_text(text);
  EXPECT_EQ(back.resolved_text(), text);
  for (const std::string& k : RunConfig::keys()) EXPECT_EQ(back.get(k), c.get(k)) << k;
}

TEST(RunConfig, LaterValuesWin) {
  RunConfig c = RunConfig::from_text("seed = 1\nseed = 2\n");
  EXPECT_EQ(c.seed(), 2u);
  c.set("seed", " 9 ");
  EXPECT_EQ(c.seed(), 9u);
  EXPECT_THROW(c.set("nope", "1"), ConfigError);
}

TEST(RunConfig, TypedViewErrorsNameTheKey) {
  auto msg = [](const std::string& text, auto view) {
    try {
      view(RunConfig::from_text(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto train = [](const RunConfig& c) { c.training_config(); };
  EXPECT_NE(msg("epochs = ten\n", train).find("epochs"), std::string::npos);
  EXPECT_NE(msg("seed = -3\n", [](const RunConfig& c) { c.seed(); }).find("seed"), std::string::npos);
  EXPECT_NE(msg("hidden = 8,x\n", train).find("hidden"), std::string::npos);
  EXPECT_NE(msg("typicalness = far\n", train).find("typicalness"), std::string::npos);
  EXPECT_NE(msg("settings = old_fd,bogus\n", [](const RunConfig& c) { c.settings(); })
                .find("settings"),
            std::string::npos);
  EXPECT_FALSE(msg("loss_mode = focal\n", train).empty());
  EXPECT_FALSE(msg("t_min = 200\n", train).empty());
  EXPECT_FALSE(msg("queue_capacity = 0\n", train).empty());
  EXPECT_FALSE(msg("ece_bins = 0\n", [](const RunConfig& c) { c.ece_bins(); }).empty());
  EXPECT_FALSE(msg("atypical_fraction = 1.5\n", [](const RunConfig& c) { c.dataset_spec(); }).empty());
}

TEST(SplitList, TrimsAndDropsEmpties) {
  EXPECT_EQ(split_list(" a, b ,,c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(split_list("").empty());
}

}  // namespace
}  // namespace tal
