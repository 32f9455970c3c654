// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` run configuration. Every key has a default; a config
// file overrides defaults and command-line values override the file. The
// resolved form lists every key in a fixed order, so it alone reproduces a
// run.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tal/data.hpp"
#include "tal/metrics.hpp"
#include "tal/trainer.hpp"

namespace tal {

class RunConfig {
 public:
  RunConfig();

  // Parses `key = value` lines; `#` starts a comment. Throws ConfigError
  // naming the unknown key or the malformed line.
  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  void merge_text(const std::string& text);
  void set(std::string_view key, std::string value);
  const std::string& get(std::string_view key) const;
  bool has_key(std::string_view key) const;

  static const std::vector<std::string>& keys();

  std::string resolved_text() const;

  // Typed views; throw ConfigError naming the offending key.
  DatasetSpec dataset_spec() const;
  TrainingConfig training_config() const;
  std::vector<Setting> settings() const;
  std::size_t ece_bins() const;
  std::uint64_t seed() const;

  std::filesystem::path out_dir() const;
  std::filesystem::path train_csv() const;
  std::filesystem::path test_csv() const;
  std::filesystem::path checkpoint_path() const;

  double get_double(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

std::vector<std::string> split_list(std::string_view text);

}  // namespace tal
