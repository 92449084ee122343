#include "bagnet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "bagnet/errors.hpp"

namespace bagnet::eval {

namespace {

bool is_gold(const data::Corpus& corpus, int entity, int type) {
  const auto& gold = corpus.entities[static_cast<std::size_t>(entity)].gold_types;
  return std::binary_search(gold.begin(), gold.end(), type);
}

struct Counts {
  long long tp = 0, fp = 0, fn = 0;
  double f1() const {
    const long long denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
};

Counts count_decisions(const data::Corpus& corpus, const TypingPredictions& preds,
                       const std::vector<double>& thresholds,
                       std::optional<data::Bucket> bucket, int head_min, int tail_max) {
  Counts counts;
  const int num_types = corpus.num_types();
  for (std::size_t i = 0; i < preds.entities.size(); ++i) {
    const int e = preds.entities[i];
    if (bucket &&
        data::frequency_bucket(corpus.entities[static_cast<std::size_t>(e)], head_min,
                               tail_max) != *bucket)
      continue;
    for (int t = 0; t < num_types; ++t) {
      const bool decide =
          preds.present[i] &&
          preds.probs[i][static_cast<std::size_t>(t)] >= thresholds[static_cast<std::size_t>(t)];
      const bool gold = is_gold(corpus, e, t);
      if (decide && gold) ++counts.tp;
      else if (decide) ++counts.fp;
      else if (gold) ++counts.fn;
    }
  }
  return counts;
}

}  // namespace

double precision_at_1(const data::Corpus& corpus, const TypingPredictions& preds) {
  if (preds.entities.empty()) return 0.0;
  long long correct = 0;
  for (std::size_t i = 0; i < preds.entities.size(); ++i) {
    if (!preds.present[i]) continue;  // no predictions counts as wrong
    const auto& p = preds.probs[i];
    std::size_t arg = 0;
    for (std::size_t t = 1; t < p.size(); ++t)
      if (p[t] > p[arg]) arg = t;
    if (is_gold(corpus, preds.entities[i], static_cast<int>(arg))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.entities.size());
}

std::vector<double> tune_thresholds(const data::Corpus& corpus,
                                    const TypingPredictions& dev) {
  const int num_types = corpus.num_types();
  std::vector<double> thresholds(static_cast<std::size_t>(num_types), 0.5);
  for (int t = 0; t < num_types; ++t) {
    long long positives = 0;
    for (std::size_t i = 0; i < dev.entities.size(); ++i)
      if (is_gold(corpus, dev.entities[i], t)) ++positives;
    if (positives == 0) {
      std::cerr << "warning: type " << corpus.types[static_cast<std::size_t>(t)]
                << " has no dev positives; threshold defaults to 0.5\n";
      continue;
    }
    std::set<double> candidates{0.5};
    for (std::size_t i = 0; i < dev.entities.size(); ++i)
      if (dev.present[i]) candidates.insert(dev.probs[i][static_cast<std::size_t>(t)]);

    double best_f1 = -1.0, best_theta = 0.5;
    bool best_is_half = false;
    for (double theta : candidates) {
      Counts counts;
      for (std::size_t i = 0; i < dev.entities.size(); ++i) {
        const bool decide =
            dev.present[i] && dev.probs[i][static_cast<std::size_t>(t)] >= theta;
        const bool gold = is_gold(corpus, dev.entities[i], t);
        if (decide && gold) ++counts.tp;
        else if (decide) ++counts.fp;
        else if (gold) ++counts.fn;
      }
      const double f1 = counts.f1();
      const bool better = f1 > best_f1 ||
                          (f1 == best_f1 && !best_is_half &&
                           (theta == 0.5 || theta > best_theta));
      if (better) {
        best_f1 = f1;
        best_theta = theta;
        best_is_half = theta == 0.5;
      }
    }
    thresholds[static_cast<std::size_t>(t)] = best_theta;
  }

  // Per-type tuning cannot guarantee the aggregate never drops; keep the
  // dev micro-F1 >= all-0.5 baseline by falling back when it would.
  const std::vector<double> half(static_cast<std::size_t>(num_types), 0.5);
  if (micro_f1(corpus, dev, thresholds) < micro_f1(corpus, dev, half)) {
    std::cerr << "warning: tuned thresholds underperform 0.5 on dev; keeping 0.5\n";
    return half;
  }
  return thresholds;
}

double micro_f1(const data::Corpus& corpus, const TypingPredictions& preds,
                const std::vector<double>& thresholds,
                std::optional<data::Bucket> bucket, int head_min, int tail_max) {
  return count_decisions(corpus, preds, thresholds, bucket, head_min, tail_max).f1();
}

double mean_average_precision(const data::Corpus& corpus,
                              const TypingPredictions& preds,
                              std::vector<std::string>* skipped_types) {
  const int num_types = corpus.num_types();
  double ap_sum = 0.0;
  int used_types = 0;
  for (int t = 0; t < num_types; ++t) {
    std::vector<std::size_t> order(preds.entities.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto score = [&](std::size_t i) {
      return preds.present[i] ? preds.probs[i][static_cast<std::size_t>(t)] : -1.0;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score(a) > score(b); });
    long long positives = 0, seen_positives = 0;
    double precision_sum = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i)
      if (is_gold(corpus, preds.entities[order[i]], t)) ++positives;
    if (positives == 0) {
      if (skipped_types) skipped_types->push_back(corpus.types[static_cast<std::size_t>(t)]);
      continue;
    }
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      if (is_gold(corpus, preds.entities[order[rank]], t)) {
        ++seen_positives;
        precision_sum +=
            static_cast<double>(seen_positives) / static_cast<double>(rank + 1);
      }
    }
    ap_sum += precision_sum / static_cast<double>(positives);
    ++used_types;
  }
  return used_types == 0 ? 0.0 : ap_sum / static_cast<double>(used_types);
}

TypingReport typing_report(const data::Corpus& corpus, const TypingPredictions& preds,
                           const std::vector<double>& thresholds,
                           int head_min, int tail_max) {
  TypingReport report;
  report.p_at_1 = precision_at_1(corpus, preds);
  report.micro_f1_all = micro_f1(corpus, preds, thresholds, std::nullopt, head_min, tail_max);
  report.micro_f1_head =
      micro_f1(corpus, preds, thresholds, data::Bucket::head, head_min, tail_max);
  report.micro_f1_tail =
      micro_f1(corpus, preds, thresholds, data::Bucket::tail, head_min, tail_max);
  report.map = mean_average_precision(corpus, preds);
  report.thresholds = thresholds;
  return report;
}

PrCurve pr_curve(const std::vector<PairScore>& scores,
                 const std::vector<const data::RelationInstance*>& gold,
                 int na_relation) {
  std::map<std::pair<int, int>, int> gold_relation;
  long long positives = 0;
  for (const data::RelationInstance* inst : gold) {
    gold_relation[{inst->e1, inst->e2}] = inst->relation;
    if (inst->relation != na_relation) ++positives;
  }
  if (positives == 0)
    throw DataError("pr_curve: gold set has no positive pairs; recall undefined");

  std::vector<PairScore> ranked;
  ranked.reserve(scores.size());
  for (const PairScore& s : scores)
    if (s.relation != na_relation) ranked.push_back(s);
  std::sort(ranked.begin(), ranked.end(), [](const PairScore& a, const PairScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.e1 != b.e1) return a.e1 < b.e1;
    if (a.e2 != b.e2) return a.e2 < b.e2;
    return a.relation < b.relation;
  });

  PrCurve curve;
  long long tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto it = gold_relation.find({ranked[i].e1, ranked[i].e2});
    const bool correct = it != gold_relation.end() && it->second == ranked[i].relation;
    if (correct) ++tp;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    if (correct) curve.area += precision / static_cast<double>(positives);
    curve.precision.push_back(precision);
    curve.recall.push_back(recall);
  }
  return curve;
}

std::map<std::string, double> per_relation_f1(
    const data::Corpus& corpus,
    const std::vector<const data::RelationInstance*>& gold,
    const std::vector<std::vector<double>>& pair_probs) {
  const int num_rel = static_cast<int>(corpus.relations.size());
  std::vector<Counts> counts(static_cast<std::size_t>(num_rel));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& probs = pair_probs[i];
    std::size_t arg = 0;
    for (std::size_t r = 1; r < probs.size(); ++r)
      if (probs[r] > probs[arg]) arg = r;
    const int predicted = static_cast<int>(arg);
    const int actual = gold[i]->relation;
    if (predicted == actual) {
      ++counts[static_cast<std::size_t>(actual)].tp;
    } else {
      ++counts[static_cast<std::size_t>(predicted)].fp;
      ++counts[static_cast<std::size_t>(actual)].fn;
    }
  }
  std::map<std::string, double> out;
  for (int r = 0; r < num_rel; ++r) {
    if (r == corpus.na_relation) continue;
    out[corpus.relations[static_cast<std::size_t>(r)]] =
        counts[static_cast<std::size_t>(r)].f1();
  }
  return out;
}

}  // namespace bagnet::eval
