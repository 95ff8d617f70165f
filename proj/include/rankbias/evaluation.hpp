/**
 * @file evaluation.hpp
 * @brief Scoring inference output against crowd judgments and labelled truth.
 *
 * Crowd workers judge a subject's content as pro-Democratic, pro-Republican,
 * or neutral. Folding those votes into a score in [-1, 1] gives a reference
 * signal the follow-based inference can be checked against: a confusion
 * matrix over coarse bins, a threshold sweep that picks the neutral cutoff
 * maximising the matrix diagonal, per-class coverage/accuracy against curated
 * labels, and a fine-binned crosstab of account bias versus judged content.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankbias/error.hpp"
#include "rankbias/leaning.hpp"
#include "rankbias/model.hpp"

namespace rankbias {

// ── crowd judgments ─────────────────────────────────────────────────────────

enum class Judgment { ProDemocratic, ProRepublican, Neutral };

inline const char* to_string(Judgment j) {
  switch (j) {
    case Judgment::ProDemocratic: return "pro-democratic";
    case Judgment::ProRepublican: return "pro-republican";
    case Judgment::Neutral: return "neutral";
  }
  return "unknown";
}

inline std::optional<Judgment> parse_judgment(std::string_view text) {
  if (text == "pro-democratic") return Judgment::ProDemocratic;
  if (text == "pro-republican") return Judgment::ProRepublican;
  if (text == "neutral") return Judgment::Neutral;
  return std::nullopt;
}

/// All judgments collected for one subject (a user's tweets, or one tweet).
struct JudgmentSet {
  std::string subject;
  std::vector<Judgment> judgments;

  friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;
};

/// Net crowd leaning: (pro-Democratic - pro-Republican) / total votes.
/// Unanimous votes hit the endpoints; a split or all-neutral set stays near 0.
inline double amt_score(const JudgmentSet& set) {
  if (set.judgments.empty()) {
    throw EmptyJudgments("amt_score: no judgments for subject '" + set.subject + "'");
  }
  std::int64_t dem = 0;
  std::int64_t rep = 0;
  for (Judgment j : set.judgments) {
    if (j == Judgment::ProDemocratic) ++dem;
    if (j == Judgment::ProRepublican) ++rep;
  }
  return static_cast<double>(dem - rep) / static_cast<double>(set.judgments.size());
}

// ── score binning ───────────────────────────────────────────────────────────

/// ThreeBin mirrors the discrete labels: [-1,-0.5] republican-leaning,
/// (-0.5,0.5) neutral, [0.5,1] democratic-leaning. SevenBin is the finer
/// grid used for the content crosstab, with exact zero kept as its own bin:
/// [-1,-0.75) [-0.75,-0.25) [-0.25,0) [0] (0,0.25] (0.25,0.75] (0.75,1].
enum class BinningScheme { ThreeBin, SevenBin };

inline int bin_count(BinningScheme scheme) {
  return scheme == BinningScheme::ThreeBin ? 3 : 7;
}

inline int bin_index(BinningScheme scheme, double score) {
  if (!std::isfinite(score) || score < -1.0 || score > 1.0) {
    throw InvalidParams("bin_index: score outside [-1,1]");
  }
  if (scheme == BinningScheme::ThreeBin) {
    if (score <= -0.5) return 0;
    if (score >= 0.5) return 2;
    return 1;
  }
  if (score < -0.75) return 0;
  if (score < -0.25) return 1;
  if (score < 0.0) return 2;
  if (score == 0.0) return 3;
  if (score <= 0.25) return 4;
  if (score <= 0.75) return 5;
  return 6;
}

inline const char* bin_label(BinningScheme scheme, int index) {
  static constexpr std::array<const char*, 3> kThree = {
      "[-1,-0.5]", "(-0.5,0.5)", "[0.5,1]"};
  static constexpr std::array<const char*, 7> kSeven = {
      "[-1,-0.75)", "[-0.75,-0.25)", "[-0.25,0)", "0",
      "(0,0.25]",   "(0.25,0.75]",   "(0.75,1]"};
  if (index < 0 || index >= bin_count(scheme)) {
    throw InvalidParams("bin_label: index out of range");
  }
  return scheme == BinningScheme::ThreeBin ? kThree[static_cast<std::size_t>(index)]
                                           : kSeven[static_cast<std::size_t>(index)];
}

// ── confusion matrix ────────────────────────────────────────────────────────

/// Column order for inferred labels. Uninferable has no column; those
/// subjects are excluded and counted.
inline int label_column(LeaningLabel label) {
  switch (label) {
    case LeaningLabel::Republican: return 0;
    case LeaningLabel::Neutral: return 1;
    case LeaningLabel::Democratic: return 2;
    case LeaningLabel::Uninferable: break;
  }
  throw InvalidParams("label_column: uninferable has no column");
}

/// Rows: crowd score in ThreeBin order (republican / neutral / democratic
/// leaning). Columns: inferred label in the same order, so agreement sits on
/// the diagonal.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 3>, 3> counts{};
  std::int64_t overlap = 0;                // pairs counted into the matrix
  std::int64_t excluded_uninferable = 0;   // common subjects with no label

  /// Row-normalised percentages; an empty row stays all zero.
  std::array<std::array<double, 3>, 3> percentage() const {
    std::array<std::array<double, 3>, 3> out{};
    for (int r = 0; r < 3; ++r) {
      std::int64_t row_total = 0;
      for (int c = 0; c < 3; ++c) row_total += counts[r][c];
      if (row_total == 0) continue;
      for (int c = 0; c < 3; ++c) {
        out[r][c] = 100.0 * static_cast<double>(counts[r][c]) /
                    static_cast<double>(row_total);
      }
    }
    return out;
  }

  /// Sum of the diagonal percentages; 300 means every row agrees perfectly.
  double diagonal_sum() const {
    const auto pct = percentage();
    return pct[0][0] + pct[1][1] + pct[2][2];
  }
};

/// Crosses inferred labels with crowd scores over their common subjects.
inline ConfusionMatrix confusion(const std::map<UserId, LeaningLabel>& inferred,
                                 const std::map<UserId, double>& crowd_scores) {
  ConfusionMatrix m;
  for (const auto& [user, score] : crowd_scores) {
    const auto it = inferred.find(user);
    if (it == inferred.end()) continue;
    if (it->second == LeaningLabel::Uninferable) {
      ++m.excluded_uninferable;
      continue;
    }
    const int row = bin_index(BinningScheme::ThreeBin, score);
    const int col = label_column(it->second);
    ++m.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    ++m.overlap;
  }
  if (m.overlap == 0) {
    throw NoOverlap("confusion: no subject has both a label and a crowd score");
  }
  return m;
}

// ── neutral-threshold sweep ─────────────────────────────────────────────────

inline constexpr std::array<double, 5> kDefaultThresholdCandidates{
    0.01, 0.03, 0.05, 0.08, 0.1};

struct ThresholdSelection {
  double threshold = 0.0;
  double diagonal_sum = 0.0;
  ConfusionMatrix matrix;
};

/// Discretises the normalised scores at each candidate cutoff and keeps the
/// one whose confusion diagonal is largest; ties go to the smaller cutoff.
inline ThresholdSelection select_threshold(
    const std::map<UserId, BiasScore>& normalized,
    const std::map<UserId, double>& crowd_scores,
    std::span<const double> candidates = kDefaultThresholdCandidates) {
  if (candidates.empty()) {
    throw InvalidParams("select_threshold: no candidate cutoffs");
  }
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());

  std::optional<ThresholdSelection> best;
  for (double x : sorted) {
    std::map<UserId, LeaningLabel> labels;
    for (const auto& [user, score] : normalized) {
      labels.emplace(user, discretize(score, x));
    }
    ConfusionMatrix m = confusion(labels, crowd_scores);
    const double diag = m.diagonal_sum();
    if (!best || diag > best->diagonal_sum) {
      best = ThresholdSelection{x, diag, std::move(m)};
    }
  }
  return *best;
}

// ── coverage and accuracy against curated labels ────────────────────────────

struct ClassStats {
  std::int64_t total = 0;     // truth subjects of this class seen by inference
  std::int64_t inferred = 0;  // of those, how many got a concrete label
  std::int64_t correct = 0;   // of those, how many matched the truth

  /// Percent of subjects that received a concrete label.
  double coverage() const {
    return total == 0 ? 0.0
                      : 100.0 * static_cast<double>(inferred) /
                            static_cast<double>(total);
  }

  /// Percent correct among the inferred; absent when nothing was inferred.
  std::optional<double> accuracy() const {
    if (inferred == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(inferred);
  }
};

struct CoverageAccuracy {
  std::map<LeaningLabel, ClassStats> per_class;  // keyed by the truth label
  ClassStats overall;
  std::optional<double> macro_accuracy;  // mean over classes with an accuracy

  std::int64_t truth_only = 0;     // truth subjects the inference never saw
  std::int64_t inferred_only = 0;  // inference results with no truth label
  std::int64_t excluded_uninferable_truth = 0;  // truth rows marked uninferable
};

/// Scores inferred labels against curated truth labels. Subjects present in
/// only one map are excluded and counted; uninferable truth rows likewise.
/// An inferred Uninferable counts against coverage but not accuracy.
inline CoverageAccuracy coverage_accuracy(
    const std::map<UserId, LeaningLabel>& inferred,
    const std::map<UserId, LeaningLabel>& truth) {
  CoverageAccuracy out;
  for (const auto& [user, truth_label] : truth) {
    const auto it = inferred.find(user);
    if (it == inferred.end()) {
      ++out.truth_only;
      continue;
    }
    if (truth_label == LeaningLabel::Uninferable) {
      ++out.excluded_uninferable_truth;
      continue;
    }
    ClassStats& cls = out.per_class[truth_label];
    ++cls.total;
    ++out.overall.total;
    if (it->second == LeaningLabel::Uninferable) continue;
    ++cls.inferred;
    ++out.overall.inferred;
    if (it->second == truth_label) {
      ++cls.correct;
      ++out.overall.correct;
    }
  }
  for (const auto& [user, label] : inferred) {
    if (!truth.contains(user)) ++out.inferred_only;
  }
  double acc_sum = 0.0;
  int acc_classes = 0;
  for (const auto& [label, cls] : out.per_class) {
    if (const auto acc = cls.accuracy()) {
      acc_sum += *acc;
      ++acc_classes;
    }
  }
  if (acc_classes > 0) out.macro_accuracy = acc_sum / acc_classes;
  return out;
}

// ── judged content vs source account label ──────────────────────────────────

struct CrosstabRow {
  std::int64_t republican = 0;
  std::int64_t neutral = 0;
  std::int64_t democratic = 0;

  std::int64_t total() const { return republican + neutral + democratic; }

  /// Row-normalised percentages {rep, neutral, dem}; all zero when empty.
  std::array<double, 3> percentage() const {
    const auto t = static_cast<double>(total());
    if (t == 0.0) return {0.0, 0.0, 0.0};
    return {100.0 * static_cast<double>(republican) / t,
            100.0 * static_cast<double>(neutral) / t,
            100.0 * static_cast<double>(democratic) / t};
  }
};

struct SourceContentCrosstab {
  std::array<CrosstabRow, 7> rows{};  // SevenBin over the judged content score
  std::int64_t overlap = 0;           // items counted into some row
  std::int64_t excluded_uninferable = 0;  // items whose source has no label

  /// Percent of counted items whose content score fell in this bin.
  double tweet_share(int row) const {
    if (row < 0 || row >= 7) throw InvalidParams("tweet_share: row out of range");
    if (overlap == 0) return 0.0;
    return 100.0 * static_cast<double>(rows[static_cast<std::size_t>(row)].total()) /
           static_cast<double>(overlap);
  }
};

/// Bins each item by its judged content score and tallies the label of the
/// item's source account per bin. Items whose source is uninferable are
/// excluded and counted; items present in only one map are skipped.
inline SourceContentCrosstab source_content_crosstab(
    const std::map<ItemId, BiasScore>& content_scores,
    const std::map<ItemId, LeaningLabel>& source_labels) {
  SourceContentCrosstab out;
  for (const auto& [item, score] : content_scores) {
    const auto it = source_labels.find(item);
    if (it == source_labels.end()) continue;
    if (it->second == LeaningLabel::Uninferable) {
      ++out.excluded_uninferable;
      continue;
    }
    CrosstabRow& row =
        out.rows[static_cast<std::size_t>(bin_index(BinningScheme::SevenBin, score.value))];
    switch (it->second) {
      case LeaningLabel::Republican: ++row.republican; break;
      case LeaningLabel::Neutral: ++row.neutral; break;
      case LeaningLabel::Democratic: ++row.democratic; break;
      case LeaningLabel::Uninferable: break;  // unreachable
    }
    ++out.overlap;
  }
  if (out.overlap == 0) {
    throw NoOverlap("source_content_crosstab: no judged item has a source label");
  }
  return out;
}

}  // namespace rankbias
