// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic failure-detection benchmark and the CSV exchange format.
//
// Typical samples come from isotropic Gaussians around C class centers.
// Atypical samples sit in the midpoint region between two centers but carry
// a hard label of one of them. The test split holds three equally sized
// blocks: in-distribution (same process as training), covariate-shifted
// (typical samples pushed through a fixed affine map plus noise, labels
// kept) and semantic-shifted (held-out centers, no label).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tal/core_math.hpp"
#include "tal/metrics.hpp"

namespace tal {

struct Sample {
  std::string id;
  Vector x;
  std::optional<std::size_t> label;
  Domain domain = Domain::kId;
};

struct Dataset {
  std::size_t feature_dim = 0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t count(Domain d) const;
};

struct DatasetSpec {
  std::uint64_t seed = 0;
  std::size_t n_classes = 8;
  std::size_t feature_dim = 16;
  std::size_t train_size = 4000;
  // Size of each test block (id, covariate, semantic).
  std::size_t test_size = 1000;
  double atypical_fraction = 0.1;
  // Minimum distance between any two cluster centers; centers lie on a
  // sphere of this radius.
  double separation = 4.0;
  double spread = 1.0;
  double covariate_noise = 1.0;
  std::size_t n_semantic_classes = 4;

  void validate() const;
};

// Provenance of a generated training or id-test sample.
struct SampleOrigin {
  bool atypical = false;
  std::size_t parent_a = 0;
  std::size_t parent_b = 0;  // equals parent_a for typical samples
};

struct GeneratedBenchmark {
  Dataset train;
  Dataset test;
  std::vector<SampleOrigin> train_origin;
  std::vector<Vector> class_centers;
  std::vector<Vector> semantic_centers;
};

// Typical and atypical draws never land farther than this many spreads from
// their (mid)point.
inline constexpr double kTruncationRadius = 6.0;

GeneratedBenchmark generate(const DatasetSpec& spec);

// Header: id,label,domain,x0,...,x{D-1}. Floats use 17 significant digits.
std::string to_csv(const Dataset& data);
void export_csv(const Dataset& data, const std::filesystem::path& path);

// Throws ParseError naming the offending line. When expected_dim is given
// the header must have exactly that many feature columns.
Dataset parse_csv(const std::string& text, std::optional<std::size_t> expected_dim = {});
Dataset import_csv(const std::filesystem::path& path,
                   std::optional<std::size_t> expected_dim = {});

// Shortest text that round-trips and 17-significant-digit text, respectively.
std::string format_double(double v);
std::string format_double17(double v);

}  // namespace tal
