#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "propspan/annotation.hpp"
#include "propspan/tag_codec.hpp"

namespace propspan {

class UnknownIdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateIdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TechniqueScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double macro_f1 = 0.0;
  std::array<TechniqueScore, kTechniqueCount> per_technique{};
};

inline double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

// Partial-match credit of a (span, span) pair with normalizer h: character
// overlap divided by h when the techniques match, zero otherwise.
inline double pair_credit(const Span& s, const Span& t, CharOffset h) {
  if (s.technique != t.technique) return 0.0;
  return static_cast<double>(overlap(s, t)) / static_cast<double>(h);
}

namespace detail {

// Total credit of one span against every candidate span of its tweet.
// Credits are summed uncapped; this is the single point to change if a
// per-span cap is ever wanted. Summation over a sorted copy keeps the
// result independent of span order.
inline double span_credit(const Span& s, const std::vector<Span>& candidates,
                          CharOffset h) {
  std::vector<double> credits;
  for (const Span& t : candidates) {
    const double c = pair_credit(s, t, h);
    if (c > 0.0) credits.push_back(c);
  }
  std::sort(credits.begin(), credits.end());
  double total = 0.0;
  for (const double c : credits) total += c;
  return total;
}

inline double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const double v : values) total += v;
  return total;
}

inline std::unordered_map<std::string, const TweetAnnotation*> index_tweets(
    const std::vector<TweetAnnotation>& tweets, const char* side) {
  std::unordered_map<std::string, const TweetAnnotation*> index;
  index.reserve(tweets.size());
  for (const TweetAnnotation& t : tweets) {
    if (!index.emplace(t.id, &t).second) {
      throw DuplicateIdError(std::string("duplicate id in ") + side + ": " +
                             t.id);
    }
  }
  return index;
}

struct PrCounts {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
};

// Corpus-level partial-credit precision/recall, optionally restricted to a
// single technique.
inline PrCounts task2_pr(
    const std::vector<TweetAnnotation>& gold,
    const std::vector<TweetAnnotation>& pred,
    const std::unordered_map<std::string, const TweetAnnotation*>& gold_by_id,
    const std::unordered_map<std::string, const TweetAnnotation*>& pred_by_id,
    std::optional<Technique> only) {
  const auto keep = [&](const Span& s) {
    return !only || s.technique == *only;
  };
  PrCounts out;
  std::vector<double> precision_credits;
  for (const TweetAnnotation& p : pred) {
    const TweetAnnotation& g = *gold_by_id.at(p.id);
    std::vector<Span> gold_spans;
    for (const Span& t : g.spans) {
      if (keep(t)) gold_spans.push_back(t);
    }
    for (const Span& s : p.spans) {
      if (!keep(s)) continue;
      ++out.n_pred;
      precision_credits.push_back(span_credit(s, gold_spans, span_length(s)));
    }
  }
  std::vector<double> recall_credits;
  for (const TweetAnnotation& g : gold) {
    std::vector<Span> pred_spans;
    if (const auto it = pred_by_id.find(g.id); it != pred_by_id.end()) {
      for (const Span& s : it->second->spans) {
        if (keep(s)) pred_spans.push_back(s);
      }
    }
    for (const Span& t : g.spans) {
      if (!keep(t)) continue;
      ++out.n_gold;
      recall_credits.push_back(span_credit(t, pred_spans, span_length(t)));
    }
  }
  out.precision = out.n_pred > 0
                      ? ordered_sum(std::move(precision_credits)) /
                            static_cast<double>(out.n_pred)
                      : 0.0;
  out.recall = out.n_gold > 0 ? ordered_sum(std::move(recall_credits)) /
                                    static_cast<double>(out.n_gold)
                              : 0.0;
  return out;
}

}  // namespace detail

// Span-level partial-credit micro F1. Precision normalizes each predicted
// span's credit by its own length and averages over all predicted spans;
// recall mirrors that over gold spans. Pairing is per tweet; empty sides
// score zero by convention.
inline ScoreReport score_task2(const std::vector<TweetAnnotation>& gold,
                               const std::vector<TweetAnnotation>& pred) {
  const auto gold_by_id = detail::index_tweets(gold, "gold");
  const auto pred_by_id = detail::index_tweets(pred, "predictions");
  for (const TweetAnnotation& p : pred) {
    if (!gold_by_id.contains(p.id)) {
      throw UnknownIdError("prediction id not present in gold: " + p.id);
    }
  }

  ScoreReport report;
  const auto micro =
      detail::task2_pr(gold, pred, gold_by_id, pred_by_id, std::nullopt);
  report.precision = micro.precision;
  report.recall = micro.recall;
  report.f1 = f1_score(report.precision, report.recall);

  double macro_sum = 0.0;
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    const auto pr = detail::task2_pr(gold, pred, gold_by_id, pred_by_id,
                                     technique_at(k));
    TechniqueScore& ts = report.per_technique[k];
    ts.precision = pr.precision;
    ts.recall = pr.recall;
    ts.f1 = f1_score(pr.precision, pr.recall);
    ts.support = pr.n_gold;
    macro_sum += ts.f1;
  }
  report.macro_f1 = macro_sum / static_cast<double>(kTechniqueCount);
  return report;
}

using LabeledTweet = std::pair<std::string, LabelSet>;

// Multi-label micro F1 over (tweet, technique) decisions, plus macro F1
// averaged over all 20 techniques regardless of support. Gold tweets with
// no matching prediction count as empty predictions.
inline ScoreReport score_task1(const std::vector<LabeledTweet>& gold,
                               const std::vector<LabeledTweet>& pred) {
  std::unordered_map<std::string, const LabelSet*> gold_by_id;
  for (const LabeledTweet& g : gold) {
    if (!gold_by_id.emplace(g.first, &g.second).second) {
      throw DuplicateIdError("duplicate id in gold: " + g.first);
    }
  }
  std::unordered_map<std::string, const LabelSet*> pred_by_id;
  for (const LabeledTweet& p : pred) {
    if (!gold_by_id.contains(p.first)) {
      throw UnknownIdError("prediction id not present in gold: " + p.first);
    }
    if (!pred_by_id.emplace(p.first, &p.second).second) {
      throw DuplicateIdError("duplicate id in predictions: " + p.first);
    }
  }

  std::array<std::size_t, kTechniqueCount> tp{};
  std::array<std::size_t, kTechniqueCount> fp{};
  std::array<std::size_t, kTechniqueCount> fn{};
  static const LabelSet kEmpty;
  for (const LabeledTweet& g : gold) {
    const auto it = pred_by_id.find(g.first);
    const LabelSet& predicted = it != pred_by_id.end() ? *it->second : kEmpty;
    for (std::size_t k = 0; k < kTechniqueCount; ++k) {
      const bool in_gold = g.second.contains(technique_at(k));
      const bool in_pred = predicted.contains(technique_at(k));
      if (in_gold && in_pred) ++tp[k];
      if (!in_gold && in_pred) ++fp[k];
      if (in_gold && !in_pred) ++fn[k];
    }
  }

  ScoreReport report;
  std::size_t tp_all = 0;
  std::size_t fp_all = 0;
  std::size_t fn_all = 0;
  double macro_sum = 0.0;
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    tp_all += tp[k];
    fp_all += fp[k];
    fn_all += fn[k];
    TechniqueScore& ts = report.per_technique[k];
    ts.precision = tp[k] + fp[k] > 0
                       ? static_cast<double>(tp[k]) /
                             static_cast<double>(tp[k] + fp[k])
                       : 0.0;
    ts.recall = tp[k] + fn[k] > 0 ? static_cast<double>(tp[k]) /
                                        static_cast<double>(tp[k] + fn[k])
                                  : 0.0;
    ts.f1 = f1_score(ts.precision, ts.recall);
    ts.support = tp[k] + fn[k];
    macro_sum += ts.f1;
  }
  report.precision = tp_all + fp_all > 0
                         ? static_cast<double>(tp_all) /
                               static_cast<double>(tp_all + fp_all)
                         : 0.0;
  report.recall = tp_all + fn_all > 0
                      ? static_cast<double>(tp_all) /
                            static_cast<double>(tp_all + fn_all)
                      : 0.0;
  report.f1 = f1_score(report.precision, report.recall);
  report.macro_f1 = macro_sum / static_cast<double>(kTechniqueCount);
  return report;
}

}  // namespace propspan
