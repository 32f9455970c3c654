// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace tal {

// Confidence-rate functions over logits. All are oriented so that a larger
// value means more confident.
enum class ScoreKind { kMsp, kMaxLogit, kCosine, kEnergy, kEntropy };

inline constexpr std::array<ScoreKind, 5> kAllScores = {
    ScoreKind::kMsp, ScoreKind::kMaxLogit, ScoreKind::kCosine, ScoreKind::kEnergy,
    ScoreKind::kEntropy};

std::string_view score_name(ScoreKind kind);
ScoreKind parse_score(std::string_view name);

struct ConfidenceScores {
  double msp = 0.0;
  double max_logit = 0.0;
  // Empty for the all-zero logit vector, which has no direction.
  std::optional<double> cosine;
  double energy = 0.0;
  double entropy = 0.0;
  std::size_t predicted = 0;

  // Throws DegenerateLogitsError when asked for a missing cosine.
  double get(ScoreKind kind) const;
};

ConfidenceScores confidence_scores(std::span<const double> logits);

enum class Decision { kAccept, kReject };

// Accept iff score >= threshold.
Decision decide(double score, double threshold);

}  // namespace tal
