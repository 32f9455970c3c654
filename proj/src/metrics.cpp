// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tal/error.hpp"

namespace tal {

namespace {

struct Counts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Counts count(const BinaryScoredSet& set) {
  Counts c;
  for (const ScoredLabel& s : set) (s.positive ? c.positives : c.negatives)++;
  return c;
}

Counts require_both_classes(const BinaryScoredSet& set, std::string_view metric) {
  const Counts c = count(set);
  if (c.positives == 0 || c.negatives == 0) {
    throw DegenerateSetError(std::string(metric) + " needs at least one positive and one negative");
  }
  return c;
}

// Indices sorted by descending score, ties in input order.
std::vector<std::size_t> descending_order(const BinaryScoredSet& set) {
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set[a].score > set[b].score; });
  return order;
}

double mean_risk(const std::vector<bool>& positives_in_rank_order) {
  std::size_t negatives = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < positives_in_rank_order.size(); ++k) {
    if (!positives_in_rank_order[k]) ++negatives;
    sum += static_cast<double>(negatives) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(positives_in_rank_order.size());
}

BinaryScoredSet assemble_impl(const std::vector<EvaluationRecord>& records, Setting setting) {
  BinaryScoredSet out;
  out.reserve(records.size());
  for (const EvaluationRecord& r : records) {
    const bool correct = r.correct && r.domain != Domain::kSemantic;
    switch (setting) {
      case Setting::kOldFd:
        if (r.domain == Domain::kId) out.push_back({r.score, correct});
        break;
      case Setting::kOodD:
        if (r.domain != Domain::kCovariate) out.push_back({r.score, r.domain == Domain::kId});
        break;
      case Setting::kNewFd:
        out.push_back({r.score, correct});
        break;
    }
  }
  return out;
}

}  // namespace

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::kId: return "id";
    case Domain::kCovariate: return "covariate";
    case Domain::kSemantic: return "semantic";
  }
  return "?";
}

Domain parse_domain(std::string_view name) {
  if (name == "id") return Domain::kId;
  if (name == "covariate") return Domain::kCovariate;
  if (name == "semantic") return Domain::kSemantic;
  throw InvalidInputError("unknown domain '" + std::string(name) + "'");
}

std::string_view setting_name(Setting s) {
  switch (s) {
    case Setting::kOldFd: return "old_fd";
    case Setting::kOodD: return "ood_d";
    case Setting::kNewFd: return "new_fd";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  for (Setting s : kAllSettings) {
    if (setting_name(s) == name) return s;
  }
  throw InvalidInputError("unknown setting '" + std::string(name) + "'");
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kAurc: return "aurc";
    case Metric::kEaurc: return "eaurc";
    case Metric::kAuroc: return "auroc";
    case Metric::kFpr95: return "fpr95";
    case Metric::kTnr95: return "tnr95";
    case Metric::kAuprSuccess: return "aupr_success";
    case Metric::kAuprError: return "aupr_error";
  }
  return "?";
}

BinaryScoredSet assemble(const std::vector<EvaluationRecord>& records, Setting setting) {
  BinaryScoredSet out = assemble_impl(records, setting);
  const Counts c = count(out);
  if (c.positives == 0 || c.negatives == 0) {
    throw DegenerateSetError(std::string(setting_name(setting)) +
                             " set lacks positives or negatives");
  }
  return out;
}

BinaryScoredSet assemble_lenient(const std::vector<EvaluationRecord>& records, Setting setting) {
  return assemble_impl(records, setting);
}

RiskCoverageCurve risk_coverage(const BinaryScoredSet& set) {
  if (set.empty()) throw DegenerateSetError("risk-coverage of an empty set");
  const std::vector<std::size_t> order = descending_order(set);
  RiskCoverageCurve curve(set.size());
  const double n = static_cast<double>(set.size());
  std::size_t negatives = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!set[order[k]].positive) ++negatives;
    curve[k].coverage = static_cast<double>(k + 1) / n;
    curve[k].risk = static_cast<double>(negatives) / static_cast<double>(k + 1);
  }
  return curve;
}

double aurc(const BinaryScoredSet& set) {
  if (set.empty()) throw DegenerateSetError("aurc of an empty set");
  std::vector<bool> ranked;
  ranked.reserve(set.size());
  for (std::size_t i : descending_order(set)) ranked.push_back(set[i].positive);
  return mean_risk(ranked);
}

double eaurc(const BinaryScoredSet& set) {
  if (set.empty()) throw DegenerateSetError("eaurc of an empty set");
  const Counts c = count(set);
  std::vector<bool> oracle(set.size(), false);
  std::fill(oracle.begin(), oracle.begin() + static_cast<std::ptrdiff_t>(c.positives), true);
  return aurc(set) - mean_risk(oracle);
}

double auroc(const BinaryScoredSet& set) {
  const Counts c = require_both_classes(set, "auroc");
  // Walk ascending score groups; every positive in a group beats all
  // negatives below it and ties with the negatives inside it. Counts are kept
  // doubled so the tie half stays integral.
  std::vector<std::size_t> order = descending_order(set);
  std::reverse(order.begin(), order.end());
  unsigned long long twice_wins = 0;
  std::size_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    std::size_t group_neg = 0;
    while (j < order.size() && set[order[j]].score == set[order[i]].score) {
      (set[order[j]].positive ? group_pos : group_neg)++;
      ++j;
    }
    twice_wins += 2ULL * group_pos * negatives_below + 1ULL * group_pos * group_neg;
    negatives_below += group_neg;
    i = j;
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(c.positives) * static_cast<double>(c.negatives));
}

double fpr_at_95tpr(const BinaryScoredSet& set) {
  const Counts c = require_both_classes(set, "fpr95");
  const std::vector<std::size_t> order = descending_order(set);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = set[order[i]].score;
    while (i < order.size() && set[order[i]].score == threshold) {
      (set[order[i]].positive ? tp : fp)++;
      ++i;
    }
    // TPR >= 0.95, evaluated in integers.
    if (20 * tp >= 19 * c.positives) {
      return static_cast<double>(fp) / static_cast<double>(c.negatives);
    }
  }
  return 1.0;
}

double tnr_at_95tpr(const BinaryScoredSet& set) { return 1.0 - fpr_at_95tpr(set); }

double aupr(const BinaryScoredSet& set, PrPolarity polarity) {
  BinaryScoredSet view = set;
  if (polarity == PrPolarity::kError) {
    for (ScoredLabel& s : view) {
      s.positive = !s.positive;
      s.score = -s.score;
    }
  }
  const Counts c = count(view);
  if (c.positives == 0) throw DegenerateSetError("aupr needs at least one positive");
  const double p = static_cast<double>(c.positives);
  const std::vector<std::size_t> order = descending_order(view);
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t prev_tp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = view[order[i]].score;
    while (i < order.size() && view[order[i]].score == threshold) {
      (view[order[i]].positive ? tp : fp)++;
      ++i;
    }
    if (tp > prev_tp) {
      area += (static_cast<double>(tp - prev_tp) / p) *
              (static_cast<double>(tp) / static_cast<double>(tp + fp));
      prev_tp = tp;
    }
  }
  return area;
}

double ece(const std::vector<EvaluationRecord>& records, std::size_t bins) {
  if (bins == 0) throw InvalidInputError("ece needs at least one bin");
  if (records.empty()) throw InvalidInputError("ece of an empty record list");
  std::vector<double> conf(bins, 0.0);
  std::vector<double> hits(bins, 0.0);
  std::vector<std::size_t> n(bins, 0);
  for (const EvaluationRecord& r : records) {
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw InvalidInputError("ece expects confidences in [0, 1]");
    }
    const std::size_t b =
        std::min(bins - 1, static_cast<std::size_t>(r.score * static_cast<double>(bins)));
    conf[b] += r.score;
    hits[b] += r.correct ? 1.0 : 0.0;
    ++n[b];
  }
  const double total = static_cast<double>(records.size());
  double out = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (n[b] == 0) continue;
    const double nb = static_cast<double>(n[b]);
    out += (nb / total) * std::abs(hits[b] / nb - conf[b] / nb);
  }
  return out;
}

double reported_metric(const BinaryScoredSet& set, Metric m) {
  switch (m) {
    case Metric::kAurc: return 1e3 * aurc(set);
    case Metric::kEaurc: return 1e3 * eaurc(set);
    case Metric::kAuroc: return auroc(set);
    case Metric::kFpr95: return fpr_at_95tpr(set);
    case Metric::kTnr95: return tnr_at_95tpr(set);
    case Metric::kAuprSuccess: return aupr(set, PrPolarity::kSuccess);
    case Metric::kAuprError: return aupr(set, PrPolarity::kError);
  }
  return 0.0;
}

}  // namespace tal
