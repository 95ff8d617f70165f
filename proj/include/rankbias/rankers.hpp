#pragma once

// Deterministic re-ranking strategies over an input corpus, used to ask
// how much ranking bias an alternative ordering policy would produce.
// Ordering is total: primary key descending, then created_at descending,
// then item id ascending byte-wise, so equal inputs give equal outputs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankbias/bias_metrics.hpp"
#include "rankbias/error.hpp"
#include "rankbias/model.hpp"

namespace rankbias {

enum class RankingStrategy {
  Observed,  // as captured; never re-ranked here
  MostRetweetedFirst,
  MostFavoritedFirst,
  ReverseChronological,  // newest first
};

inline const char* to_string(RankingStrategy s) {
  switch (s) {
    case RankingStrategy::Observed: return "observed";
    case RankingStrategy::MostRetweetedFirst: return "most-retweeted";
    case RankingStrategy::MostFavoritedFirst: return "most-favorited";
    case RankingStrategy::ReverseChronological: return "reverse-chronological";
  }
  return "observed";
}

inline std::optional<RankingStrategy> parse_ranking_strategy(const std::string& s) {
  if (s == "observed") return RankingStrategy::Observed;
  if (s == "most-retweeted") return RankingStrategy::MostRetweetedFirst;
  if (s == "most-favorited") return RankingStrategy::MostFavoritedFirst;
  if (s == "reverse-chronological") return RankingStrategy::ReverseChronological;
  return std::nullopt;
}

// Top-k page the strategy would have served from the corpus.
inline RankedSnapshot rerank(const InputCorpus& corpus,
                             const std::map<ItemId, Item>& item_store,
                             RankingStrategy strategy, int k = kDefaultPageSize) {
  if (strategy == RankingStrategy::Observed) {
    throw InvalidParams("rerank: observed ranking cannot be recomputed");
  }
  if (k < 1) throw InvalidParams("rerank: page size below 1");
  if (corpus.items.empty()) throw EmptyCorpus("rerank: empty corpus for " + corpus.query);

  std::vector<const Item*> items;
  items.reserve(corpus.items.size());
  for (const auto& id : corpus.items) {
    auto it = item_store.find(id);
    if (it == item_store.end()) throw UnknownItem("rerank: unknown item " + id);
    items.push_back(&it->second);
  }

  auto key = [strategy](const Item& item) -> std::int64_t {
    switch (strategy) {
      case RankingStrategy::MostRetweetedFirst: return item.retweet_count;
      case RankingStrategy::MostFavoritedFirst: return item.favorite_count;
      default: return item.created_at;
    }
  };
  std::sort(items.begin(), items.end(), [&](const Item* a, const Item* b) {
    const std::int64_t ka = key(*a), kb = key(*b);
    if (ka != kb) return ka > kb;
    if (a->created_at != b->created_at) return a->created_at > b->created_at;
    return a->id < b->id;
  });

  RankedSnapshot page;
  page.query = corpus.query;
  page.captured_at = 0;  // synthetic page, not time-indexed
  const std::size_t depth = std::min<std::size_t>(items.size(), static_cast<std::size_t>(k));
  page.ranked_items.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) page.ranked_items.push_back(items[i]->id);
  return page;
}

// Ranking bias the strategy's page would show against the given input
// bias: output bias of the re-ranked page (after the unscored-drop rule)
// minus ib.
inline double strategy_ranking_bias(const InputCorpus& corpus,
                                    const std::map<ItemId, Item>& item_store,
                                    RankingStrategy strategy, int k, BiasScore ib) {
  const RankedSnapshot page = rerank(corpus, item_store, strategy, k);
  const ScoredList list = prepare_scored_list(page, item_store);
  if (list.scores.empty()) {
    throw EmptyCorpus("strategy_ranking_bias: no scored items in the top " +
                      std::to_string(k) + " for " + corpus.query);
  }
  return ranking_bias(output_bias(list, k), ib);
}

}  // namespace rankbias
