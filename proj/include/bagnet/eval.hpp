#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bagnet/corpus.hpp"

namespace bagnet::eval {

// Per-entity type predictions: probs[e][t] for the evaluated entities.
// `present` marks entities that actually have predictions; absent entities
// count as wrong for P@1 and contribute only false negatives to F1.
struct TypingPredictions {
  std::vector<int> entities;  // corpus entity indices
  std::vector<std::vector<double>> probs;
  std::vector<bool> present;
};

struct TypingReport {
  double p_at_1 = 0.0;
  double micro_f1_all = 0.0;
  double micro_f1_head = 0.0;
  double micro_f1_tail = 0.0;
  double map = 0.0;
  std::vector<double> thresholds;  // per type
};

// Fraction of entities whose argmax-probability type is gold; argmax ties
// break toward the lowest type id.
double precision_at_1(const data::Corpus& corpus, const TypingPredictions& preds);

// Per type, picks the threshold from {0.5} union {observed dev scores} that
// maximizes that type's dev F1 (ties prefer 0.5, then the larger threshold).
// A final guard keeps dev micro-F1 from dropping below the all-0.5 baseline:
// if it would, all thresholds fall back to 0.5.
std::vector<double> tune_thresholds(const data::Corpus& corpus,
                                    const TypingPredictions& dev);

// Micro-averaged F1 of all entity-type decisions (p >= threshold) over the
// entities in the bucket; no bucket means all entities.
double micro_f1(const data::Corpus& corpus, const TypingPredictions& preds,
                const std::vector<double>& thresholds,
                std::optional<data::Bucket> bucket = std::nullopt,
                int head_min = 100, int tail_max = 5);

// MAP over types with at least one positive; AP = mean precision at each
// positive in the ranking of entities by predicted probability.
double mean_average_precision(const data::Corpus& corpus,
                              const TypingPredictions& preds,
                              std::vector<std::string>* skipped_types = nullptr);

TypingReport typing_report(const data::Corpus& corpus, const TypingPredictions& preds,
                           const std::vector<double>& thresholds,
                           int head_min = 100, int tail_max = 5);

// Corpus-level relation scores: one score per (pair, non-NA relation).
struct PairScore {
  int e1 = -1, e2 = -1;
  int relation = -1;
  double score = 0.0;
};

struct PrCurve {
  std::vector<double> recall;     // non-decreasing
  std::vector<double> precision;  // same length
  double area = 0.0;              // step rule: sum of precision * delta-recall
};

// Sorts the non-NA scores descending and computes prefix precision/recall
// against the gold relation of each pair; throws DataError when the gold set
// has no positives.
PrCurve pr_curve(const std::vector<PairScore>& scores,
                 const std::vector<const data::RelationInstance*>& gold,
                 int na_relation);

// Per-relation F1 of argmax decisions (NA included as a class, excluded from
// the report keys).
std::map<std::string, double> per_relation_f1(
    const data::Corpus& corpus,
    const std::vector<const data::RelationInstance*>& gold,
    const std::vector<std::vector<double>>& pair_probs);

}  // namespace bagnet::eval
