// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/scoring.hpp"

#include <cmath>
#include <string>

#include "tal/core_math.hpp"
#include "tal/error.hpp"

namespace tal {

std::string_view score_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kMsp: return "msp";
    case ScoreKind::kMaxLogit: return "maxlogit";
    case ScoreKind::kCosine: return "cosine";
    case ScoreKind::kEnergy: return "energy";
    case ScoreKind::kEntropy: return "entropy";
  }
  return "?";
}

ScoreKind parse_score(std::string_view name) {
  for (ScoreKind k : kAllScores) {
    if (score_name(k) == name) return k;
  }
  throw InvalidInputError("unknown score '" + std::string(name) + "'");
}

double ConfidenceScores::get(ScoreKind kind) const {
  switch (kind) {
    case ScoreKind::kMsp: return msp;
    case ScoreKind::kMaxLogit: return max_logit;
    case ScoreKind::kCosine:
      if (!cosine) throw DegenerateLogitsError();
      return *cosine;
    case ScoreKind::kEnergy: return energy;
    case ScoreKind::kEntropy: return entropy;
  }
  return 0.0;
}

ConfidenceScores confidence_scores(std::span<const double> logits) {
  const Vector p = softmax(logits);
  ConfidenceScores out;
  out.predicted = argmax(logits);
  out.max_logit = logits[out.predicted];
  out.msp = p[out.predicted];
  out.energy = log_sum_exp(logits);
  double h = 0.0;
  for (double pi : p) {
    if (pi > 0.0) h -= pi * std::log(pi);
  }
  out.entropy = -h;
  // Cosine against the predicted class's one-hot axis.
  try {
    out.cosine = decompose(logits).direction[out.predicted];
  } catch (const DegenerateLogitsError&) {
    out.cosine.reset();
  }
  return out;
}

Decision decide(double score, double threshold) {
  return score >= threshold ? Decision::kAccept : Decision::kReject;
}

}  // namespace tal
