#pragma once

// Rank-weighted bias metrics over scored result lists.
//
// For leaning scores s_1..s_n, best rank first:
//   input bias      IB   = (1/n) * sum_i s_i
//   bias till rank  B(r) = (1/r) * sum_{i<=r} s_i
//   output bias     OB(r)= (1/r) * sum_{i<=r} B(i)
//   ranking bias    RB   = OB - IB
// OB is a mean of prefix means, so the item at rank j carries harmonic
// weight (1/r) * sum_{m=j..r} 1/m: top ranks dominate.
//
// Items without a score are dropped and ranks close up before any metric
// is taken; snapshots emptied this way are skipped, never averaged as zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rankbias/error.hpp"
#include "rankbias/model.hpp"

namespace rankbias {

// Snapshot scores after the unscored-drop rule, best rank first.
struct ScoredList {
  std::vector<BiasScore> scores;
  std::int64_t dropped_count = 0;  // items removed for missing scores

  friend bool operator==(const ScoredList&, const ScoredList&) = default;
};

// Per-snapshot output bias for one query, in capture order.
struct SnapshotBiasSeries {
  QueryId query;
  std::vector<std::pair<std::int64_t, double>> points;  // (captured_at, ob)
  std::int64_t skipped_snapshots = 0;

  friend bool operator==(const SnapshotBiasSeries&, const SnapshotBiasSeries&) = default;
};

inline std::vector<std::string> validate(const ScoredList& list) {
  std::vector<std::string> out;
  for (const auto& s : list.scores) {
    for (const auto& v : validate(s)) {
      out.push_back("score: " + v);
      break;
    }
  }
  if (list.dropped_count < 0) out.push_back("negative dropped_count");
  return out;
}

inline std::vector<std::string> validate(const SnapshotBiasSeries& series) {
  std::vector<std::string> out;
  if (series.query.empty()) out.push_back("empty query id");
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].first <= series.points[i - 1].first) {
      out.push_back("timestamps not strictly increasing");
      break;
    }
  }
  if (series.skipped_snapshots < 0) out.push_back("negative skipped_snapshots");
  return out;
}

// Mean leaning of an unordered score collection.
inline BiasScore input_bias(const std::vector<BiasScore>& scores) {
  if (scores.empty()) throw EmptyInput("input_bias: no scores");
  double sum = 0.0;
  for (const auto& s : scores) sum += s.value;
  return BiasScore{sum / static_cast<double>(scores.size())};
}

// Mean leaning of the top r entries.
inline BiasScore bias_till_rank(const ScoredList& list, int r) {
  const int n = static_cast<int>(list.scores.size());
  if (r < 1 || r > n) {
    throw RankOutOfRange("bias_till_rank: rank " + std::to_string(r) +
                         " outside [1," + std::to_string(n) + "]");
  }
  double sum = 0.0;
  for (int i = 0; i < r; ++i) sum += list.scores[i].value;
  return BiasScore{sum / static_cast<double>(r)};
}

// Mean of prefix means down to rank min(r, length).
inline BiasScore output_bias(const ScoredList& list, int r) {
  if (r < 1) throw RankOutOfRange("output_bias: rank below 1");
  if (list.scores.empty()) throw EmptyInput("output_bias: no scores");
  const int depth = std::min(r, static_cast<int>(list.scores.size()));
  double prefix = 0.0;
  double acc = 0.0;
  for (int i = 0; i < depth; ++i) {
    prefix += list.scores[i].value;
    acc += prefix / static_cast<double>(i + 1);
  }
  return BiasScore{acc / static_cast<double>(depth)};
}

inline double ranking_bias(BiasScore ob, BiasScore ib) {
  return ob.value - ib.value;
}

// Resolve a snapshot against the item store, dropping unscored items and
// closing ranks. Every id must resolve.
inline ScoredList prepare_scored_list(const RankedSnapshot& snapshot,
                                      const std::map<ItemId, Item>& item_store) {
  ScoredList out;
  out.scores.reserve(snapshot.ranked_items.size());
  for (const auto& id : snapshot.ranked_items) {
    auto it = item_store.find(id);
    if (it == item_store.end()) {
      throw UnknownItem("prepare_scored_list: unknown item " + id);
    }
    if (it->second.source_bias) {
      out.scores.push_back(*it->second.source_bias);
    } else {
      ++out.dropped_count;
    }
  }
  return out;
}

// Output bias per snapshot, ordered by capture time. Snapshots emptied by
// the drop rule are skipped and counted. All snapshots must share a query.
inline SnapshotBiasSeries snapshot_bias_series(const std::vector<RankedSnapshot>& snapshots,
                                               const std::map<ItemId, Item>& item_store,
                                               int rank_depth) {
  if (rank_depth < 1) throw RankOutOfRange("snapshot_bias_series: rank below 1");
  if (snapshots.empty()) throw NoUsableSnapshots("snapshot_bias_series: no snapshots");
  SnapshotBiasSeries series;
  series.query = snapshots.front().query;
  std::vector<const RankedSnapshot*> ordered;
  ordered.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    if (s.query != series.query) {
      throw InvalidParams("snapshot_bias_series: mixed queries " + series.query +
                          " and " + s.query);
    }
    ordered.push_back(&s);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RankedSnapshot* a, const RankedSnapshot* b) {
                     return a->captured_at < b->captured_at;
                   });
  for (const RankedSnapshot* s : ordered) {
    ScoredList list = prepare_scored_list(*s, item_store);
    if (list.scores.empty()) {
      ++series.skipped_snapshots;
      continue;
    }
    series.points.emplace_back(s->captured_at, output_bias(list, rank_depth).value);
  }
  return series;
}

// Time-averaged metrics for one query: TOB is the mean of per-snapshot
// output biases, TIB is taken once over all scored corpus items, and
// TRB = TOB - TIB.
inline BiasReport time_averaged_metrics(const std::vector<RankedSnapshot>& snapshots,
                                        const InputCorpus& corpus,
                                        const std::map<ItemId, Item>& item_store,
                                        int rank_depth) {
  if (rank_depth < 1) throw RankOutOfRange("time_averaged_metrics: rank below 1");
  if (corpus.items.empty()) {
    throw EmptyCorpus("time_averaged_metrics: empty corpus for " + corpus.query);
  }
  std::vector<BiasScore> corpus_scores;
  corpus_scores.reserve(corpus.items.size());
  for (const auto& id : corpus.items) {
    auto it = item_store.find(id);
    if (it == item_store.end()) {
      throw UnknownItem("time_averaged_metrics: unknown item " + id);
    }
    if (it->second.source_bias) corpus_scores.push_back(*it->second.source_bias);
  }
  if (corpus_scores.empty()) {
    throw EmptyCorpus("time_averaged_metrics: no scored items for " + corpus.query);
  }

  SnapshotBiasSeries series = snapshot_bias_series(snapshots, item_store, rank_depth);
  if (series.points.empty()) {
    throw NoUsableSnapshots("time_averaged_metrics: every snapshot emptied for " +
                            corpus.query);
  }

  BiasReport report;
  report.query = corpus.query;
  report.tib = input_bias(corpus_scores);
  double sum = 0.0;
  for (const auto& [ts, ob] : series.points) sum += ob;
  report.tob = BiasScore{sum / static_cast<double>(series.points.size())};
  report.trb = ranking_bias(report.tob, report.tib);
  report.rank_depth = rank_depth;
  report.snapshot_count = static_cast<std::int64_t>(series.points.size());
  report.skipped_snapshots = series.skipped_snapshots;
  report.scored_item_fraction = static_cast<double>(corpus_scores.size()) /
                                static_cast<double>(corpus.items.size());
  return report;
}

}  // namespace rankbias
