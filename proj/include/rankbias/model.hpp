#pragma once

// Core value types shared by every rankbias module.
// All types are plain values with structural equality. validate() collects
// invariant breaches as strings and never throws; compute functions treat a
// breach as a caller bug.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rankbias {

// Opaque identifiers, compared byte-wise. Never empty once validated.
using UserId = std::string;
using ItemId = std::string;
using QueryId = std::string;
using Topic = std::string;  // lower-cased at ingestion

inline constexpr int kDefaultPageSize = 20;
inline constexpr double kDefaultNeutralThreshold = 0.03;
inline constexpr int kDefaultMinFollowings = 10;

// Leaning score in [-1, +1]: positive = democratic, negative = republican.
struct BiasScore {
  double value = 0.0;

  friend bool operator==(const BiasScore&, const BiasScore&) = default;
};

enum class LeaningLabel { Democratic, Republican, Neutral, Uninferable };

inline const char* to_string(LeaningLabel label) {
  switch (label) {
    case LeaningLabel::Democratic: return "democratic";
    case LeaningLabel::Republican: return "republican";
    case LeaningLabel::Neutral: return "neutral";
    case LeaningLabel::Uninferable: return "uninferable";
  }
  return "uninferable";
}

inline std::optional<LeaningLabel> parse_leaning_label(const std::string& s) {
  if (s == "democratic") return LeaningLabel::Democratic;
  if (s == "republican") return LeaningLabel::Republican;
  if (s == "neutral") return LeaningLabel::Neutral;
  if (s == "uninferable") return LeaningLabel::Uninferable;
  return std::nullopt;
}

// ASCII lower-casing; topics are byte-wise lowercase by construction.
inline Topic fold_topic(std::string t) {
  for (char& c : t) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return t;
}

// One ranked result (a tweet). Engagement counts are static per item;
// text is retained but never interpreted.
struct Item {
  ItemId id;
  UserId author;
  std::int64_t created_at = 0;  // epoch seconds
  std::int64_t retweet_count = 0;
  std::int64_t favorite_count = 0;
  std::optional<std::string> text;
  std::optional<BiasScore> source_bias;  // absent when the author is uninferable

  friend bool operator==(const Item&, const Item&) = default;
};

// One observed result page: best rank first, no duplicates, at most the
// configured page size.
struct RankedSnapshot {
  QueryId query;
  std::int64_t captured_at = 0;  // epoch seconds
  std::vector<ItemId> ranked_items;

  friend bool operator==(const RankedSnapshot&, const RankedSnapshot&) = default;
};

// Unordered membership of everything posted for a query over the window.
struct InputCorpus {
  QueryId query;
  std::vector<ItemId> items;  // no duplicates

  friend bool operator==(const InputCorpus&, const InputCorpus&) = default;
};

// Time-averaged bias summary for one query.
struct BiasReport {
  QueryId query;
  BiasScore tib;  // input bias over the full collection window
  BiasScore tob;  // mean per-snapshot output bias
  double trb = 0.0;  // tob - tib, lives in [-2, 2]
  int rank_depth = kDefaultPageSize;
  std::int64_t snapshot_count = 0;     // snapshots contributing to tob
  std::int64_t skipped_snapshots = 0;  // emptied by the unscored-drop rule
  double scored_item_fraction = 0.0;   // corpus items carrying a score

  friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

// ── validation ───────────────────────────────────────────────────────────

inline std::vector<std::string> validate(const BiasScore& s) {
  std::vector<std::string> out;
  if (!std::isfinite(s.value) || s.value < -1.0 || s.value > 1.0) {
    out.push_back("value out of [-1,1]");
  }
  return out;
}

inline std::vector<std::string> validate(const Item& item) {
  std::vector<std::string> out;
  if (item.id.empty()) out.push_back("empty item id");
  if (item.author.empty()) out.push_back("empty author id");
  if (item.retweet_count < 0) out.push_back("negative retweet_count");
  if (item.favorite_count < 0) out.push_back("negative favorite_count");
  if (item.source_bias) {
    for (const auto& v : validate(*item.source_bias)) {
      out.push_back("source_bias: " + v);
    }
  }
  return out;
}

namespace detail {

inline void check_id_list(const std::vector<std::string>& ids, const char* what,
                          std::vector<std::string>& out) {
  bool empty_seen = false;
  bool dup_seen = false;
  std::vector<std::string> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].empty()) empty_seen = true;
    if (i > 0 && sorted[i] == sorted[i - 1]) dup_seen = true;
  }
  if (empty_seen) out.push_back(std::string("empty id in ") + what);
  if (dup_seen) out.push_back(std::string("duplicate item in ") + what);
}

}  // namespace detail

inline std::vector<std::string> validate(const RankedSnapshot& snap,
                                         int page_size = kDefaultPageSize) {
  std::vector<std::string> out;
  if (snap.query.empty()) out.push_back("empty query id");
  detail::check_id_list(snap.ranked_items, "ranked list", out);
  if (static_cast<int>(snap.ranked_items.size()) > page_size) {
    out.push_back("ranked list longer than page size " + std::to_string(page_size));
  }
  return out;
}

inline std::vector<std::string> validate(const InputCorpus& corpus) {
  std::vector<std::string> out;
  if (corpus.query.empty()) out.push_back("empty query id");
  detail::check_id_list(corpus.items, "corpus", out);
  return out;
}

inline std::vector<std::string> validate(const BiasReport& report) {
  std::vector<std::string> out;
  if (report.query.empty()) out.push_back("empty query id");
  for (const auto& v : validate(report.tib)) out.push_back("tib: " + v);
  for (const auto& v : validate(report.tob)) out.push_back("tob: " + v);
  if (!std::isfinite(report.trb) || report.trb < -2.0 || report.trb > 2.0) {
    out.push_back("trb out of [-2,2]");
  }
  if (std::fabs(report.trb - (report.tob.value - report.tib.value)) > 1e-12) {
    out.push_back("trb does not equal tob - tib");
  }
  if (report.rank_depth < 1) out.push_back("rank_depth below 1");
  if (report.snapshot_count < 1) out.push_back("snapshot_count below 1");
  if (report.skipped_snapshots < 0) out.push_back("negative skipped_snapshots");
  if (!std::isfinite(report.scored_item_fraction) || report.scored_item_fraction < 0.0 ||
      report.scored_item_fraction > 1.0) {
    out.push_back("scored_item_fraction out of [0,1]");
  }
  return out;
}

}  // namespace rankbias
