// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "tal/checkpoint.hpp"
#include "tal/error.hpp"

namespace tal {

namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::vector<std::size_t> architecture(const RunConfig& config, const TrainingConfig& tc) {
  std::vector<std::size_t> dims{config.get_uint("feature_dim")};
  dims.insert(dims.end(), tc.hidden.begin(), tc.hidden.end());
  dims.push_back(config.get_uint("n_classes"));
  return dims;
}

// Rows of an existing epoch log up to and including `epochs` completed
// epochs, header excluded.
std::string previous_log_rows(const fs::path& path, std::size_t epochs) {
  if (!fs::exists(path)) return "";
  std::istringstream in(read_file(path));
  std::string line;
  std::string out;
  std::getline(in, line);
  for (std::size_t i = 0; i < epochs && std::getline(in, line); ++i) out += line + "\n";
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
}

void cmd_gen(const RunConfig& config, std::ostream& log) {
  const DatasetSpec spec = config.dataset_spec();
  const GeneratedBenchmark bench = generate(spec);
  const fs::path out = config.out_dir();
  ensure_dir(out);
  write_file_atomic(config.train_csv(), to_csv(bench.train));
  write_file_atomic(config.test_csv(), to_csv(bench.test));
  write_file_atomic(out / "gen.resolved.cfg", config.resolved_text());
  log << "gen: " << bench.train.size() << " train, " << bench.test.count(Domain::kId) << " id + "
      << bench.test.count(Domain::kCovariate) << " covariate + "
      << bench.test.count(Domain::kSemantic) << " semantic test samples -> " << out.string() << "\n";
}

std::string format_epoch_log(const std::vector<EpochLog>& logs, bool with_tau) {
  std::string out;
  for (const EpochLog& e : logs) {
    out += std::to_string(e.epoch) + "," + format_double(e.lr) + "," + format_double(e.train_loss) +
           "," + format_double(e.train_acc) + "," + std::to_string(e.queue_len);
    if (with_tau) out += "," + (e.mean_tau ? format_double(*e.mean_tau) : std::string());
    out += "\n";
  }
  return out;
}

void cmd_train(const RunConfig& config, const TrainOptions& options, std::ostream& log) {
  const TrainingConfig tc = config.training_config();
  const std::size_t n_classes = config.get_uint("n_classes");
  const Dataset train_set = import_csv(config.train_csv(), config.get_uint("feature_dim"));
  const LabelledBatch data = to_labelled(train_set, n_classes);

  TrainingState state;
  if (options.resume_from) {
    state = load_checkpoint(*options.resume_from);
    if (state.model.dims() != architecture(config, tc)) {
      throw ConfigError("checkpoint architecture does not match the configuration");
    }
    if (state.queue.capacity() != tc.queue_capacity) {
      throw ConfigError("checkpoint queue capacity does not match the configuration");
    }
  } else {
    state = init_training(tc, data.x.cols, n_classes);
  }
  const std::size_t start_epoch = state.epoch;
  const std::vector<EpochLog> logs = train(state, tc, data, options.stop_after);

  const fs::path out = config.out_dir();
  ensure_dir(out);
  const bool with_tau = tc.loss_mode == LossMode::kTal;
  std::string csv = "epoch,lr,train_loss,train_acc,queue_len";
  if (with_tau) csv += ",mean_tau";
  csv += "\n";
  if (start_epoch > 0) csv += previous_log_rows(out / "epoch_log.csv", start_epoch);
  csv += format_epoch_log(logs, with_tau);

  save_checkpoint(state, config.checkpoint_path());
  write_file_atomic(out / "epoch_log.csv", csv);
  write_file_atomic(out / "train.resolved.cfg", config.resolved_text());
  log << "train: " << loss_mode_name(tc.loss_mode) << ", epochs " << start_epoch << " -> "
      << state.epoch << ", final train acc "
      << (logs.empty() ? std::string("n/a") : format_double(logs.back().train_acc))
      << ", queue " << state.queue.size() << " -> " << config.checkpoint_path().string() << "\n";
}

MetricsReport build_report(const std::vector<ScoredSample>& scored,
                           const std::vector<Setting>& settings) {
  MetricsReport report;
  std::size_t id_total = 0;
  std::size_t id_correct = 0;
  for (const ScoredSample& s : scored) {
    if (s.domain != Domain::kId) continue;
    ++id_total;
    if (s.correct) ++id_correct;
  }
  report.emplace_back("id.accuracy", id_total == 0 ? kNan
                                                   : static_cast<double>(id_correct) /
                                                         static_cast<double>(id_total));
  for (Setting setting : settings) {
    for (ScoreKind kind : kAllScores) {
      std::optional<BinaryScoredSet> set;
      try {
        set = assemble_lenient(records_for(scored, kind), setting);
      } catch (const DegenerateLogitsError&) {
      }
      for (Metric m : kAllMetrics) {
        double v = kNan;
        if (set && !set->empty()) {
          try {
            v = reported_metric(*set, m);
          } catch (const DegenerateSetError&) {
          }
        }
        report.emplace_back(std::string(setting_name(setting)) + "." +
                                std::string(score_name(kind)) + "." + std::string(metric_name(m)),
                            v);
      }
    }
  }
  return report;
}

std::string format_report(const MetricsReport& report) {
  std::string out;
  for (const auto& [key, value] : report) out += key + " = " + format_double(value) + "\n";
  return out;
}

std::string format_scores_csv(const std::vector<ScoredSample>& scored) {
  std::string out = "id,label,pred,correct,domain,msp,maxlogit,cosine,energy,entropy\n";
  for (const ScoredSample& s : scored) {
    out += s.sample_id + "," + (s.label ? std::to_string(*s.label) : std::string()) + "," +
           std::to_string(s.predicted) + "," + (s.correct ? "1" : "0") + "," +
           std::string(domain_name(s.domain)) + "," + format_double(s.scores.msp) + "," +
           format_double(s.scores.max_logit) + "," +
           format_double(s.scores.cosine.value_or(kNan)) + "," + format_double(s.scores.energy) +
           "," + format_double(s.scores.entropy) + "\n";
  }
  return out;
}

MetricsReport cmd_eval(const RunConfig& config, std::ostream& log) {
  const std::vector<Setting> settings = config.settings();
  const std::size_t bins = config.ece_bins();
  const TrainingState state = load_checkpoint(config.checkpoint_path());
  const Dataset test = import_csv(config.test_csv(), state.model.input_dim());
  for (const Sample& s : test.samples) {
    if (s.label && *s.label >= state.model.n_classes()) {
      throw InvalidInputError("test sample '" + s.id + "' has a label outside the model's classes");
    }
  }
  const std::vector<ScoredSample> scored = evaluate(state.model, test);
  const MetricsReport report = build_report(scored, settings);

  const fs::path out = config.out_dir();
  ensure_dir(out);
  write_file_atomic(out / "scores.csv", format_scores_csv(scored));
  for (Setting setting : settings) {
    for (ScoreKind kind : kAllScores) {
      std::string csv = "coverage,risk\n";
      try {
        const BinaryScoredSet set = assemble_lenient(records_for(scored, kind), setting);
        if (!set.empty()) {
          for (const RiskCoveragePoint& p : risk_coverage(set)) {
            csv += format_double(p.coverage) + "," + format_double(p.risk) + "\n";
          }
        }
      } catch (const DegenerateLogitsError&) {
      }
      write_file_atomic(out / ("rc_" + std::string(setting_name(setting)) + "_" +
                               std::string(score_name(kind)) + ".csv"),
                        csv);
    }
  }

  std::vector<EvaluationRecord> id_msp;
  for (const EvaluationRecord& r : records_for(scored, ScoreKind::kMsp)) {
    if (r.domain == Domain::kId) id_msp.push_back(r);
  }
  std::string calibration = "ece_bins = " + std::to_string(bins) + "\n";
  calibration += "id.msp.ece = " + (id_msp.empty() ? std::string("nan")
                                                   : format_double(ece(id_msp, bins))) + "\n";
  write_file_atomic(out / "calibration.txt", calibration);
  write_file_atomic(out / "metrics.txt", format_report(report));
  write_file_atomic(out / "eval.resolved.cfg", config.resolved_text());

  log << "eval: " << scored.size() << " records, id accuracy " << format_double(report[0].second)
      << " -> " << out.string() << "\n";
  return report;
}

SweepOutcome cmd_sweep(const RunConfig& config, const SweepGrid& grid, std::size_t parallel,
                       std::ostream& log) {
  const std::vector<double> t_mins =
      grid.t_min.empty() ? std::vector<double>{config.get_double("t_min")} : grid.t_min;
  const std::vector<double> t_maxs =
      grid.t_max.empty() ? std::vector<double>{config.get_double("t_max")} : grid.t_max;
  const std::vector<std::size_t> caps =
      grid.queue_capacity.empty() ? std::vector<std::size_t>{config.get_uint("queue_capacity")}
                                  : grid.queue_capacity;
  const std::vector<std::uint64_t> seeds =
      grid.seeds.empty() ? std::vector<std::uint64_t>{config.seed()} : grid.seeds;

  struct Cell {
    double t_min, t_max;
    std::size_t capacity;
  };
  std::vector<Cell> cells;
  for (double lo : t_mins)
    for (double hi : t_maxs)
      for (std::size_t cap : caps) cells.push_back({lo, hi, cap});

  struct Job {
    std::size_t cell;
    std::uint64_t seed;
    std::string error;
    MetricsReport report;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t s : seeds) jobs.push_back({c, s, {}, {}});

  const fs::path out = config.out_dir();
  ensure_dir(out);
  auto run_job = [&](Job& job) {
    const Cell& cell = cells[job.cell];
    RunConfig rc = config;
    rc.set("out", (out / ("cell" + std::to_string(job.cell) + "_seed" + std::to_string(job.seed)))
                      .string());
    rc.set("train_csv", "");
    rc.set("test_csv", "");
    rc.set("checkpoint", "");
    rc.set("seed", std::to_string(job.seed));
    rc.set("t_min", format_double(cell.t_min));
    rc.set("t_max", format_double(cell.t_max));
    rc.set("queue_capacity", std::to_string(cell.capacity));
    std::ostringstream quiet;
    try {
      cmd_gen(rc, quiet);
      cmd_train(rc, {}, quiet);
      job.report = cmd_eval(rc, quiet);
    } catch (const std::exception& e) {
      job.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::max<std::size_t>(1, std::min(parallel, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(jobs[i]);
    });
  }
  for (std::thread& t : pool) t.join();

  std::vector<std::string> keys;
  for (const Job& j : jobs) {
    if (j.error.empty()) {
      for (const auto& [k, v] : j.report) keys.push_back(k);
      break;
    }
  }

  std::string csv = "kind,cell,seed,t_min,t_max,queue_capacity,status";
  for (const std::string& k : keys) csv += "," + k;
  for (const std::string& k : keys) csv += "," + k + ".std";
  csv += "\n";
  auto cell_prefix = [&](std::size_t c) {
    return std::to_string(c) + ",";
  };
  auto cell_params = [&](std::size_t c) {
    return format_double(cells[c].t_min) + "," + format_double(cells[c].t_max) + "," +
           std::to_string(cells[c].capacity);
  };
  SweepOutcome outcome;
  outcome.cells = cells.size();
  outcome.runs = jobs.size();
  for (const Job& j : jobs) {
    csv += "run," + cell_prefix(j.cell) + std::to_string(j.seed) + "," + cell_params(j.cell) + ",";
    if (j.error.empty()) {
      csv += "ok";
      for (const auto& [k, v] : j.report) csv += "," + format_double(v);
      for (std::size_t i = 0; i < keys.size(); ++i) csv += ",";
    } else {
      ++outcome.failed_runs;
      std::string msg = j.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      csv += "error: " + msg;
      for (std::size_t i = 0; i < 2 * keys.size(); ++i) csv += ",";
      log << "sweep: cell " << j.cell << " seed " << j.seed << " failed: " << j.error << "\n";
    }
    csv += "\n";
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<const Job*> ok;
    for (const Job& j : jobs) {
      if (j.cell == c && j.error.empty()) ok.push_back(&j);
    }
    if (ok.empty()) continue;
    csv += "aggregate," + cell_prefix(c) + "," + cell_params(c) + ",n=" + std::to_string(ok.size());
    std::vector<double> means(keys.size(), 0.0);
    std::vector<double> stds(keys.size(), 0.0);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      double sum = 0.0;
      for (const Job* j : ok) sum += j->report[k].second;
      means[k] = sum / static_cast<double>(ok.size());
      double sq = 0.0;
      for (const Job* j : ok) sq += (j->report[k].second - means[k]) * (j->report[k].second - means[k]);
      stds[k] = ok.size() > 1 ? std::sqrt(sq / static_cast<double>(ok.size() - 1)) : 0.0;
    }
    for (double m : means) csv += "," + format_double(m);
    for (double s : stds) csv += "," + format_double(s);
    csv += "\n";
  }
  write_file_atomic(out / "sweep.csv", csv);
  write_file_atomic(out / "sweep.resolved.cfg", config.resolved_text());
  log << "sweep: " << outcome.runs - outcome.failed_runs << "/" << outcome.runs << " runs over "
      << outcome.cells << " cells -> " << (out / "sweep.csv").string() << "\n";
  return outcome;
}

}  // namespace tal
