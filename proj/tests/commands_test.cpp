// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tal/error.hpp"

namespace tal {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("tal_commands_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  RunConfig tiny(const std::string& sub, const std::string& extra = "") const {
    RunConfig c = RunConfig::from_text(
        "seed = 2\n"
        "n_classes = 3\nfeature_dim = 4\ntrain_size = 90\ntest_size = 30\nn_semantic_classes = 2\n"
        "hidden = 8,8\nepochs = 6\nbatch_size = 16\nwarmup_fraction = 0.34\nqueue_capacity = 40\n" +
        extra);
    c.set("out", (root_ / sub).string());
    return c;
  }

  fs::path root_;
  std::ostringstream log_;
};

TEST_F(CommandsTest, GenCreatesMissingDirectories) {
  const RunConfig c = tiny("a/b/c");
  cmd_gen(c, log_);
  EXPECT_TRUE(fs::exists(root_ / "a/b/c/train.csv"));
  EXPECT_TRUE(fs::exists(root_ / "a/b/c/test.csv"));
  EXPECT_EQ(slurp(root_ / "a/b/c/gen.resolved.cfg"), c.resolved_text());
  EXPECT_EQ(count_lines(slurp(root_ / "a/b/c/test.csv")), 1u + 90u);
}

TEST_F(CommandsTest, FullPipelineOutputs) {
  const RunConfig c = tiny("run");
  cmd_gen(c, log_);
  cmd_train(c, {}, log_);
  const MetricsReport report = cmd_eval(c, log_);
  EXPECT_EQ(report.size(), 1u + 3u * 5u * 7u);
  EXPECT_EQ(report[0].first, "id.accuracy");
  EXPECT_EQ(slurp(root_ / "run/metrics.txt"), format_report(report));

  const std::string log = slurp(root_ / "run/epoch_log.csv");
  EXPECT_EQ(log.substr(0, log.find('\n')), "epoch,lr,train_loss,train_acc,queue_len,mean_tau");
  EXPECT_EQ(count_lines(log), 7u);
  EXPECT_EQ(count_lines(slurp(root_ / "run/scores.csv")), 1u + 90u);
  EXPECT_EQ(count_lines(slurp(root_ / "run/rc_new_fd_cosine.csv")), 1u + 90u);
  EXPECT_EQ(count_lines(slurp(root_ / "run/rc_old_fd_msp.csv")), 1u + 30u);
  EXPECT_NE(slurp(root_ / "run/calibration.txt").find("ece_bins = 15"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "run/checkpoint.bin") || fs::exists(c.checkpoint_path()));
}

TEST_F(CommandsTest, NoTauColumnOutsideTalMode) {
  const RunConfig c = tiny("ce", "loss_mode = ce\n");
  cmd_gen(c, log_);
  cmd_train(c, {}, log_);
  const std::string log = slurp(root_ / "ce/epoch_log.csv");
  EXPECT_EQ(log.substr(0, log.find('\n')), "epoch,lr,train_loss,train_acc,queue_len");
}

TEST_F(CommandsTest, RunsAreDeterministic) {
  const RunConfig a = tiny("a");
  const RunConfig b = tiny("b");
  for (const RunConfig* c : {&a, &b}) {
    cmd_gen(*c, log_);
    cmd_train(*c, {}, log_);
    cmd_eval(*c, log_);
  }
  for (const char* f : {"train.csv", "test.csv", "epoch_log.csv", "scores.csv", "metrics.txt"}) {
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
  }
  EXPECT_EQ(slurp(a.checkpoint_path()), slurp(b.checkpoint_path()));
}

TEST_F(CommandsTest, ResumeMatchesUninterrupted) {
  const RunConfig full = tiny("full");
  cmd_gen(full, log_);
  cmd_train(full, {}, log_);

  const RunConfig part = tiny("part");
  cmd_gen(part, log_);
  cmd_train(part, {std::nullopt, 3}, log_);
  EXPECT_EQ(count_lines(slurp(root_ / "part/epoch_log.csv")), 4u);
  cmd_train(part, {part.checkpoint_path(), std::nullopt}, log_);

  EXPECT_EQ(slurp(part.checkpoint_path()), slurp(full.checkpoint_path()));
  EXPECT_EQ(slurp(root_ / "part/epoch_log.csv"), slurp(root_ / "full/epoch_log.csv"));
}

TEST_F(CommandsTest, ResumeRejectsDifferentArchitecture) {
  const RunConfig c = tiny("r");
  cmd_gen(c, log_);
  cmd_train(c, {std::nullopt, 2}, log_);
  RunConfig wider = c;
  wider.set("hidden", "16,8");
  EXPECT_THROW(cmd_train(wider, {c.checkpoint_path(), std::nullopt}, log_), ConfigError);
}

TEST_F(CommandsTest, EvalWithoutCheckpointFails) {
  const RunConfig c = tiny("none");
  cmd_gen(c, log_);
  EXPECT_THROW(cmd_eval(c, log_), Error);
}

TEST_F(CommandsTest, SweepGridAndAggregates) {
  const RunConfig c = tiny("sweep", "epochs = 3\n");
  SweepGrid grid;
  grid.t_min = {5, 10, 20};
  grid.t_max = {50, 100, 150};
  grid.seeds = {1, 2};
  const SweepOutcome out = cmd_sweep(c, grid, 2, log_);
  EXPECT_EQ(out.cells, 9u);
  EXPECT_EQ(out.runs, 18u);
  EXPECT_EQ(out.failed_runs, 0u);
  const std::string csv = slurp(root_ / "sweep/sweep.csv");
  EXPECT_EQ(count_lines(csv), 1u + 18u + 9u);
  EXPECT_EQ(csv.rfind("kind,cell,seed,t_min,t_max,queue_capacity,status,id.accuracy", 0), 0u);
  std::istringstream in(csv);
  std::string line;
  std::size_t runs = 0, aggregates = 0;
  while (std::getline(in, line)) {
    if (line.rfind("run,", 0) == 0) ++runs;
    if (line.rfind("aggregate,", 0) == 0) {
      ++aggregates;
      EXPECT_NE(line.find(",n=2"), std::string::npos);
    }
  }
  EXPECT_EQ(runs, 18u);
  EXPECT_EQ(aggregates, 9u);
}

TEST_F(CommandsTest, SweepKeepsGoingPastABadCell) {
  const RunConfig c = tiny("bad", "epochs = 3\n");
  SweepGrid grid;
  grid.t_min = {10, 200};
  grid.t_max = {100};
  grid.seeds = {1};
  const SweepOutcome out = cmd_sweep(c, grid, 1, log_);
  EXPECT_EQ(out.runs, 2u);
  EXPECT_EQ(out.failed_runs, 1u);
  const std::string csv = slurp(root_ / "bad/sweep.csv");
  EXPECT_NE(csv.find(",error: "), std::string::npos);
  EXPECT_NE(csv.find(",n=1"), std::string::npos);
  EXPECT_EQ(csv.find("aggregate,"), csv.rfind("aggregate,"));
}

ScoredSample sample(Domain d, bool correct, double conf) {
  ScoredSample s;
  s.sample_id = "s";
  s.domain = d;
  s.correct = correct;
  s.label = d == Domain::kSemantic ? std::nullopt : std::optional<std::size_t>(0);
  s.scores = {conf, conf, conf, conf, conf};
  return s;
}

double lookup(const MetricsReport& r, const std::string& key) {
  for (const auto& [k, v] : r) {
    if (k == key) return v;
  }
  ADD_FAILURE() << "missing " << key;
  return 0.0;
}

TEST(BuildReport, PerfectRankingAndEmptySets) {
  const std::vector<ScoredSample> scored{sample(Domain::kId, true, 0.9), sample(Domain::kId, true, 0.8),
                                         sample(Domain::kId, false, 0.1), sample(Domain::kId, false, 0.2)};
  const MetricsReport r = build_report(scored, {Setting::kOldFd, Setting::kOodD});
  EXPECT_EQ(r.size(), 1u + 2u * 35u);
  EXPECT_EQ(lookup(r, "id.accuracy"), 0.5);
  EXPECT_EQ(lookup(r, "old_fd.msp.eaurc"), 0.0);
  EXPECT_NEAR(lookup(r, "old_fd.msp.aurc"), 1e3 * (0.0 + 0.0 + 1.0 / 3.0 + 0.5) / 4.0, 1e-9);
  EXPECT_EQ(lookup(r, "old_fd.energy.auroc"), 1.0);
  EXPECT_TRUE(std::isnan(lookup(r, "ood_d.msp.auroc")));
}

TEST(WriteFileAtomic, ReplacesContents) {
  const fs::path p = fs::temp_directory_path() / "tal_atomic_test.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(slurp(p), "two");
  EXPECT_FALSE(fs::exists(p.string() + ".partial"));
  fs::remove(p);
}

}  // namespace
}  // namespace tal
