// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "tal/error.hpp"

namespace tal {

namespace {

// Declaration order is the order of the resolved file.
const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> kDefaults = {
      {"seed", "0"},
      {"out", "run"},
      {"train_csv", ""},
      {"test_csv", ""},
      {"checkpoint", ""},
      // data
      {"n_classes", "8"},
      {"feature_dim", "16"},
      {"train_size", "4000"},
      {"test_size", "1000"},
      {"atypical_fraction", "0.1"},
      {"separation", "4"},
      {"spread", "1"},
      {"covariate_noise", "1"},
      {"n_semantic_classes", "4"},
      // training
      {"hidden", "64,64"},
      {"epochs", "200"},
      {"batch_size", "128"},
      {"learning_rate", "0.1"},
      {"momentum", "0.9"},
      {"weight_decay", "0.0005"},
      {"warmup_fraction", "0.05"},
      {"loss_mode", "tal"},
      {"t_min", "10"},
      {"t_max", "100"},
      {"fixed_t", "10"},
      {"queue_capacity", "2000"},
      {"typicalness", "nearest"},
      {"knn_k", "10"},
      // evaluation
      {"settings", "old_fd,ood_d,new_fd"},
      {"ece_bins", "15"},
  };
  return kDefaults;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string item =
        trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_.emplace(k, v);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> k;
    for (const auto& [key, value] : defaults()) k.push_back(key);
    return k;
  }();
  return kKeys;
}

bool RunConfig::has_key(std::string_view key) const { return values_.find(key) != values_.end(); }

void RunConfig::set(std::string_view key, std::string value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = trim(value);
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

void RunConfig::merge_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (!has_key(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown config key '" + key +
                        "'");
    }
    set(key, body.substr(eq + 1));
  }
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  c.merge_text(text);
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_text(buf.str());
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const std::string& k : keys()) out += k + " = " + get(k) + "\n";
  return out;
}

double RunConfig::get_double(std::string_view key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("config key '" + std::string(key) + "' expects a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t RunConfig::get_uint(std::string_view key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) + "' expects a non-negative integer, got '" +
                      v + "'");
  }
  return out;
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
  return split_list(get(key));
}

std::uint64_t RunConfig::seed() const { return get_uint("seed"); }

DatasetSpec RunConfig::dataset_spec() const {
  DatasetSpec s;
  s.seed = seed();
  s.n_classes = get_uint("n_classes");
  s.feature_dim = get_uint("feature_dim");
  s.train_size = get_uint("train_size");
  s.test_size = get_uint("test_size");
  s.atypical_fraction = get_double("atypical_fraction");
  s.separation = get_double("separation");
  s.spread = get_double("spread");
  s.covariate_noise = get_double("covariate_noise");
  s.n_semantic_classes = get_uint("n_semantic_classes");
  try {
    s.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

TrainingConfig RunConfig::training_config() const {
  TrainingConfig c;
  c.seed = seed();
  c.epochs = get_uint("epochs");
  c.batch_size = get_uint("batch_size");
  c.learning_rate = get_double("learning_rate");
  c.momentum = get_double("momentum");
  c.weight_decay = get_double("weight_decay");
  c.warmup_fraction = get_double("warmup_fraction");
  c.loss_mode = parse_loss_mode(get("loss_mode"));
  c.sched.t_min = get_double("t_min");
  c.sched.t_max = get_double("t_max");
  c.fixed_t = get_double("fixed_t");
  c.queue_capacity = get_uint("queue_capacity");
  const std::string& measure = get("typicalness");
  if (measure == "nearest") {
    c.measure = DistanceMeasure::nearest();
  } else if (measure == "knn") {
    c.measure = DistanceMeasure::knn(get_uint("knn_k"));
  } else {
    throw ConfigError("config key 'typicalness' expects nearest or knn, got '" + measure + "'");
  }
  c.hidden.clear();
  for (const std::string& h : get_list("hidden")) {
    std::size_t w = 0;
    const auto res = std::from_chars(h.data(), h.data() + h.size(), w);
    if (res.ec != std::errc() || res.ptr != h.data() + h.size()) {
      throw ConfigError("config key 'hidden' expects a list of widths, got '" + get("hidden") + "'");
    }
    c.hidden.push_back(w);
  }
  c.validate();
  return c;
}

std::vector<Setting> RunConfig::settings() const {
  std::vector<Setting> out;
  for (const std::string& s : get_list("settings")) {
    try {
      out.push_back(parse_setting(s));
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("config key 'settings': ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("config key 'settings' is empty");
  return out;
}

std::size_t RunConfig::ece_bins() const {
  const std::uint64_t b = get_uint("ece_bins");
  if (b == 0) throw ConfigError("config key 'ece_bins' must be positive");
  return b;
}

std::filesystem::path RunConfig::out_dir() const { return get("out"); }

std::filesystem::path RunConfig::train_csv() const {
  return get("train_csv").empty() ? out_dir() / "train.csv" : std::filesystem::path(get("train_csv"));
}

std::filesystem::path RunConfig::test_csv() const {
  return get("test_csv").empty() ? out_dir() / "test.csv" : std::filesystem::path(get("test_csv"));
}

std::filesystem::path RunConfig::checkpoint_path() const {
  return get("checkpoint").empty() ? out_dir() / "checkpoint.bin"
                                   : std::filesystem::path(get("checkpoint"));
}

}  // namespace tal
