// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Failure-detection metrics over scored predictions.
//
// A BinaryScoredSet pairs each confidence score with whether the prediction
// should be accepted. The three evaluation settings differ only in how test
// records are mapped onto that set:
//   old_fd : in-distribution records only, accept iff correct.
//   ood_d  : in-distribution vs semantic-shift records, correctness ignored.
//   new_fd : everything, accept iff correct and not semantic-shift.
//
// Sorting ties are broken by input order everywhere, so every metric is a
// deterministic function of the input sequence.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tal {

enum class Domain { kId, kCovariate, kSemantic };

std::string_view domain_name(Domain d);
Domain parse_domain(std::string_view name);

enum class Setting { kOldFd, kOodD, kNewFd };

inline constexpr std::array<Setting, 3> kAllSettings = {Setting::kOldFd, Setting::kOodD,
                                                       Setting::kNewFd};

std::string_view setting_name(Setting s);
Setting parse_setting(std::string_view name);

struct EvaluationRecord {
  std::string sample_id;
  double score = 0.0;
  std::size_t predicted = 0;
  std::optional<std::size_t> label;  // empty for semantic-shift samples
  Domain domain = Domain::kId;
  bool correct = false;
};

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

using BinaryScoredSet = std::vector<ScoredLabel>;

// Throws DegenerateSetError when the result lacks positives or negatives.
BinaryScoredSet assemble(const std::vector<EvaluationRecord>& records, Setting setting);
// Same mapping without the two-class check. Reports use it so that metrics
// defined on one-class sets (AURC, AUPR) are still produced.
BinaryScoredSet assemble_lenient(const std::vector<EvaluationRecord>& records, Setting setting);

struct RiskCoveragePoint {
  double coverage = 0.0;
  double risk = 0.0;
};

using RiskCoverageCurve = std::vector<RiskCoveragePoint>;

// Points at coverage k/N, k = 1..N, after sorting by descending score.
RiskCoverageCurve risk_coverage(const BinaryScoredSet& set);

double aurc(const BinaryScoredSet& set);
// aurc minus the aurc of the same labels with every positive ranked first.
double eaurc(const BinaryScoredSet& set);
double auroc(const BinaryScoredSet& set);
double fpr_at_95tpr(const BinaryScoredSet& set);
double tnr_at_95tpr(const BinaryScoredSet& set);

enum class PrPolarity { kSuccess, kError };
double aupr(const BinaryScoredSet& set, PrPolarity polarity);

// Expected calibration error over equal-width bins of [0, 1]. Record scores
// must be MSP values.
double ece(const std::vector<EvaluationRecord>& records, std::size_t bins = 15);

enum class Metric { kAurc, kEaurc, kAuroc, kFpr95, kTnr95, kAuprSuccess, kAuprError };

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::kAurc,  Metric::kEaurc,       Metric::kAuroc,     Metric::kFpr95,
    Metric::kTnr95, Metric::kAuprSuccess, Metric::kAuprError};

std::string_view metric_name(Metric m);

// Value as reported: AURC and EAURC are scaled by 1e3, the rest are raw
// fractions. Propagates DegenerateSetError.
double reported_metric(const BinaryScoredSet& set, Metric m);

}  // namespace tal
