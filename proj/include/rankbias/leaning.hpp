#pragma once

// Leaning inference from follow relationships.
//
// A user's interests are the topics of the accounts they follow, weighted
// by tf-idf over a declared reference population:
//   weight(t) = (1 + ln f_t) * ln(N / n_t)
// where f_t counts distinct followed accounts labelled t, N is the
// population size and n_t the number of population members following at
// least one account labelled t. Topics unseen in the population are
// dropped (idf undefined) and counted.
//
// raw leaning  = cos(I_u, I_D) - cos(I_u, I_R) over normalized seed
// aggregates, then clamped-rescaled by the population's max |raw| and
// discretized with a neutral zone (-x, x).
//
// Users with no followings, fewer than the minimum distinct followings,
// or an all-zero interest vector are Uninferable, never mislabelled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rankbias/error.hpp"
#include "rankbias/model.hpp"

namespace rankbias {

using FollowGraph = std::map<UserId, std::vector<UserId>>;
using TopicLabels = std::map<UserId, std::vector<Topic>>;

// Distinct-follow counts per topic for one user. Counts are always >= 1;
// topics the user never touches are simply absent.
struct TopicFrequencyList {
  UserId user;
  std::map<Topic, std::int64_t> entries;

  friend bool operator==(const TopicFrequencyList&, const TopicFrequencyList&) = default;
};

// Sparse tf-idf interest vector. Weights are finite and >= 0; a weight of
// zero (ubiquitous topic) is kept.
struct InterestVector {
  UserId user;
  std::map<Topic, double> weights;

  friend bool operator==(const InterestVector&, const InterestVector&) = default;
};

enum class SeedSide { Democratic, Republican };

// Component-wise seed sum, normalized so the weights total 1.
struct SeedAggregate {
  SeedSide side = SeedSide::Democratic;
  std::map<Topic, double> weights;
  std::int64_t member_count = 0;

  friend bool operator==(const SeedAggregate&, const SeedAggregate&) = default;
};

struct NormalizationParams {
  double max_abs_raw = 1.0;  // strictly positive
  std::string population_id;

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

// tf-idf background statistics of the reference population.
struct ReferenceStats {
  std::int64_t population_size = 0;        // N
  std::map<Topic, std::int64_t> doc_freq;  // n_t, 1 <= n_t <= N

  friend bool operator==(const ReferenceStats&, const ReferenceStats&) = default;
};

struct TfidfDiagnostics {
  std::int64_t dropped_topics = 0;  // absent from the reference population
};

// ── validation ───────────────────────────────────────────────────────────

inline std::vector<std::string> validate(const TopicFrequencyList& list) {
  std::vector<std::string> out;
  if (list.user.empty()) out.push_back("empty user id");
  for (const auto& [topic, count] : list.entries) {
    if (topic.empty()) out.push_back("empty topic");
    if (fold_topic(topic) != topic) out.push_back("topic not lower-cased: " + topic);
    if (count < 1) out.push_back("frequency below 1 for " + topic);
  }
  return out;
}

inline std::vector<std::string> validate(const InterestVector& vec) {
  std::vector<std::string> out;
  if (vec.user.empty()) out.push_back("empty user id");
  for (const auto& [topic, weight] : vec.weights) {
    if (!std::isfinite(weight) || weight < 0.0) {
      out.push_back("weight not finite and non-negative for " + topic);
    }
  }
  return out;
}

inline std::vector<std::string> validate(const SeedAggregate& agg) {
  std::vector<std::string> out;
  if (agg.member_count < 1) out.push_back("member_count below 1");
  double sum = 0.0;
  for (const auto& [topic, weight] : agg.weights) {
    if (!std::isfinite(weight) || weight < 0.0) {
      out.push_back("weight not finite and non-negative for " + topic);
    }
    sum += weight;
  }
  if (std::fabs(sum - 1.0) > 1e-9) out.push_back("weights do not sum to 1");
  return out;
}

inline std::vector<std::string> validate(const NormalizationParams& params) {
  std::vector<std::string> out;
  if (!std::isfinite(params.max_abs_raw) || params.max_abs_raw <= 0.0) {
    out.push_back("max_abs_raw not strictly positive");
  }
  return out;
}

// ── interest construction ────────────────────────────────────────────────

namespace detail {

inline std::set<UserId> distinct_followings(const FollowGraph& graph, const UserId& user) {
  auto it = graph.find(user);
  if (it == graph.end()) return {};
  return {it->second.begin(), it->second.end()};
}

}  // namespace detail

// Topic frequencies over the user's distinct followings.
inline TopicFrequencyList build_topic_frequencies(const FollowGraph& graph,
                                                  const TopicLabels& labels,
                                                  const UserId& user,
                                                  int min_followings = kDefaultMinFollowings) {
  const std::set<UserId> followed = detail::distinct_followings(graph, user);
  if (followed.empty()) {
    throw NoFollowings("build_topic_frequencies: " + user + " follows nobody");
  }
  if (static_cast<int>(followed.size()) < min_followings) {
    throw TooFewFollowings("build_topic_frequencies: " + user + " follows " +
                           std::to_string(followed.size()) + " users, below " +
                           std::to_string(min_followings));
  }
  TopicFrequencyList list;
  list.user = user;
  for (const auto& v : followed) {
    auto lt = labels.find(v);
    if (lt == labels.end()) continue;
    std::set<Topic> seen;  // a followed user counts once per topic
    for (const auto& t : lt->second) {
      if (seen.insert(t).second) ++list.entries[t];
    }
  }
  return list;
}

// Population statistics for tf-idf: N = every account in the graph,
// n_t = members following at least one account labelled t.
inline ReferenceStats build_reference_stats(const FollowGraph& graph,
                                            const TopicLabels& labels) {
  ReferenceStats stats;
  stats.population_size = static_cast<std::int64_t>(graph.size());
  for (const auto& [user, followings] : graph) {
    std::set<Topic> topics;
    std::set<UserId> followed(followings.begin(), followings.end());
    for (const auto& v : followed) {
      auto lt = labels.find(v);
      if (lt == labels.end()) continue;
      topics.insert(lt->second.begin(), lt->second.end());
    }
    for (const auto& t : topics) ++stats.doc_freq[t];
  }
  return stats;
}

// weight(t) = (1 + ln f) * ln(N / n); natural logs throughout.
inline InterestVector tfidf_vector(const TopicFrequencyList& freqs,
                                   const ReferenceStats& stats,
                                   TfidfDiagnostics* diag = nullptr) {
  if (stats.population_size < 1) {
    throw InvalidParams("tfidf_vector: population size below 1");
  }
  InterestVector vec;
  vec.user = freqs.user;
  for (const auto& [topic, count] : freqs.entries) {
    auto it = stats.doc_freq.find(topic);
    if (it == stats.doc_freq.end() || it->second < 1) {
      if (diag) ++diag->dropped_topics;
      continue;
    }
    if (it->second > stats.population_size) {
      throw InvalidParams("tfidf_vector: doc_freq of " + topic + " exceeds population");
    }
    const double tf = 1.0 + std::log(static_cast<double>(count));
    const double idf = std::log(static_cast<double>(stats.population_size) /
                                static_cast<double>(it->second));
    vec.weights[topic] = tf * idf;
  }
  return vec;
}

inline bool is_zero_vector(const std::map<Topic, double>& weights) {
  for (const auto& [topic, w] : weights) {
    if (w != 0.0) return false;
  }
  return true;
}

// ── seed aggregation and scoring ─────────────────────────────────────────

inline SeedAggregate aggregate_seed(const std::vector<InterestVector>& vectors,
                                    SeedSide side) {
  if (vectors.empty()) throw EmptySeedSet("aggregate_seed: no seed vectors");
  SeedAggregate agg;
  agg.side = side;
  agg.member_count = static_cast<std::int64_t>(vectors.size());
  double total = 0.0;
  for (const auto& vec : vectors) {
    for (const auto& [topic, w] : vec.weights) {
      agg.weights[topic] += w;
      total += w;
    }
  }
  if (total <= 0.0) throw AllZeroVectors("aggregate_seed: every seed vector is zero");
  for (auto& [topic, w] : agg.weights) w /= total;
  return agg;
}

// Cosine over sparse non-negative vectors; clamped into [-1, 1] to absorb
// rounding at exact parallelism.
inline double cosine_similarity(const std::map<Topic, double>& a,
                                const std::map<Topic, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [topic, w] : a) na += w * w;
  for (const auto& [topic, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [topic, w] : small) {
    auto it = large.find(topic);
    if (it != large.end()) dot += w * it->second;
  }
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

// cos(I_u, I_D) - cos(I_u, I_R); positive leans democratic.
inline double raw_bias(const InterestVector& user_vec, const SeedAggregate& dem,
                       const SeedAggregate& rep) {
  if (dem.side != SeedSide::Democratic || rep.side != SeedSide::Republican) {
    throw InvalidParams("raw_bias: aggregates passed on the wrong sides");
  }
  if (is_zero_vector(dem.weights) || is_zero_vector(rep.weights)) {
    throw AllZeroVectors("raw_bias: zero seed aggregate");
  }
  if (user_vec.weights.empty() || is_zero_vector(user_vec.weights)) {
    throw UninferableBias("raw_bias: zero interest vector for " + user_vec.user);
  }
  return cosine_similarity(user_vec.weights, dem.weights) -
         cosine_similarity(user_vec.weights, rep.weights);
}

// Symmetric rescale by the population's max |raw|, clamped into [-1, 1].
// Zero stays zero; sign is preserved.
inline BiasScore normalize_bias(double raw, const NormalizationParams& params) {
  if (!std::isfinite(params.max_abs_raw) || params.max_abs_raw <= 0.0) {
    throw InvalidParams("normalize_bias: max_abs_raw must be strictly positive");
  }
  if (!std::isfinite(raw)) throw InvalidParams("normalize_bias: raw is not finite");
  return BiasScore{std::clamp(raw / params.max_abs_raw, -1.0, 1.0)};
}

// max |raw| over a scored reference population. A population scoring all
// zeros falls back to 1.0, which keeps the params valid and maps every
// score to 0.
inline NormalizationParams fit_normalization(const std::vector<double>& raw_scores,
                                             std::string population_id) {
  if (raw_scores.empty()) throw EmptyInput("fit_normalization: no raw scores");
  double max_abs = 0.0;
  for (double r : raw_scores) {
    if (!std::isfinite(r)) throw InvalidParams("fit_normalization: raw is not finite");
    max_abs = std::max(max_abs, std::fabs(r));
  }
  NormalizationParams params;
  params.max_abs_raw = max_abs > 0.0 ? max_abs : 1.0;
  params.population_id = std::move(population_id);
  return params;
}

// Neutral inside the open zone (-x, x); the boundaries lean.
inline LeaningLabel discretize(BiasScore score, double x = kDefaultNeutralThreshold) {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    throw InvalidParams("discretize: threshold outside [0,1]");
  }
  if (score.value >= x) return LeaningLabel::Democratic;
  if (score.value <= -x) return LeaningLabel::Republican;
  return LeaningLabel::Neutral;
}

// ── end-to-end inference ─────────────────────────────────────────────────

struct InferenceContext {
  ReferenceStats stats;
  SeedAggregate dem;
  SeedAggregate rep;
  NormalizationParams norm;
  double neutral_threshold = kDefaultNeutralThreshold;
  int min_followings = kDefaultMinFollowings;
};

struct InferenceResult {
  UserId user;
  LeaningLabel label = LeaningLabel::Uninferable;
  std::optional<double> raw;
  std::optional<BiasScore> normalized;
  std::string note;  // set when uninferable

  friend bool operator==(const InferenceResult&, const InferenceResult&) = default;
};

// Infer one user. Uninferable users come back labelled, never as errors:
// downstream metrics treat them as missing scores.
inline InferenceResult infer_user(const UserId& user, const FollowGraph& graph,
                                  const TopicLabels& labels,
                                  const InferenceContext& ctx) {
  InferenceResult result;
  result.user = user;
  const std::set<UserId> followed = detail::distinct_followings(graph, user);
  if (followed.empty()) {
    result.note = "no followings";
    return result;
  }
  if (static_cast<int>(followed.size()) < ctx.min_followings) {
    result.note = "fewer than " + std::to_string(ctx.min_followings) + " followings";
    return result;
  }
  const TopicFrequencyList freqs =
      build_topic_frequencies(graph, labels, user, ctx.min_followings);
  const InterestVector vec = tfidf_vector(freqs, ctx.stats);
  if (vec.weights.empty() || is_zero_vector(vec.weights)) {
    result.note = "zero interest vector";
    return result;
  }
  result.raw = raw_bias(vec, ctx.dem, ctx.rep);
  result.normalized = normalize_bias(*result.raw, ctx.norm);
  result.label = discretize(*result.normalized, ctx.neutral_threshold);
  return result;
}

struct ContextBuildInfo {
  std::int64_t dem_seeds_used = 0;
  std::int64_t rep_seeds_used = 0;
  std::int64_t dem_seeds_skipped = 0;  // missing, thin, or zero-vector seeds
  std::int64_t rep_seeds_skipped = 0;
  std::int64_t scored_population = 0;  // raw scores behind the normalization fit
};

// Assemble the full inference context: reference statistics, both seed
// aggregates, and normalization fitted over every inferable population
// member. Ineligible seeds are skipped and counted, not errors.
inline InferenceContext build_inference_context(const FollowGraph& graph,
                                                const TopicLabels& labels,
                                                const std::vector<UserId>& dem_seeds,
                                                const std::vector<UserId>& rep_seeds,
                                                double neutral_threshold,
                                                int min_followings,
                                                std::string population_id,
                                                ContextBuildInfo* info = nullptr) {
  if (min_followings < 1) {
    throw InvalidParams("build_inference_context: min_followings below 1");
  }
  InferenceContext ctx;
  ctx.neutral_threshold = neutral_threshold;
  ctx.min_followings = min_followings;
  ctx.stats = build_reference_stats(graph, labels);

  auto collect = [&](const std::vector<UserId>& seeds, std::int64_t& used,
                     std::int64_t& skipped) {
    std::vector<InterestVector> vectors;
    for (const auto& id : seeds) {
      const std::set<UserId> followed = detail::distinct_followings(graph, id);
      if (static_cast<int>(followed.size()) < min_followings) {
        ++skipped;
        continue;
      }
      InterestVector vec =
          tfidf_vector(build_topic_frequencies(graph, labels, id, min_followings), ctx.stats);
      if (vec.weights.empty() || is_zero_vector(vec.weights)) {
        ++skipped;
        continue;
      }
      vectors.push_back(std::move(vec));
      ++used;
    }
    return vectors;
  };

  std::int64_t dem_used = 0, dem_skip = 0, rep_used = 0, rep_skip = 0;
  std::vector<InterestVector> dem_vecs = collect(dem_seeds, dem_used, dem_skip);
  std::vector<InterestVector> rep_vecs = collect(rep_seeds, rep_used, rep_skip);
  if (dem_vecs.empty()) throw EmptySeedSet("build_inference_context: no usable democratic seeds");
  if (rep_vecs.empty()) throw EmptySeedSet("build_inference_context: no usable republican seeds");
  ctx.dem = aggregate_seed(dem_vecs, SeedSide::Democratic);
  ctx.rep = aggregate_seed(rep_vecs, SeedSide::Republican);

  std::vector<double> raw_scores;
  for (const auto& [user, followings] : graph) {
    const std::set<UserId> followed(followings.begin(), followings.end());
    if (static_cast<int>(followed.size()) < min_followings) continue;
    InterestVector vec =
        tfidf_vector(build_topic_frequencies(graph, labels, user, min_followings), ctx.stats);
    if (vec.weights.empty() || is_zero_vector(vec.weights)) continue;
    raw_scores.push_back(raw_bias(vec, ctx.dem, ctx.rep));
  }
  if (raw_scores.empty()) {
    ctx.norm = NormalizationParams{1.0, std::move(population_id)};
  } else {
    ctx.norm = fit_normalization(raw_scores, std::move(population_id));
  }

  if (info) {
    info->dem_seeds_used = dem_used;
    info->rep_seeds_used = rep_used;
    info->dem_seeds_skipped = dem_skip;
    info->rep_seeds_skipped = rep_skip;
    info->scored_population = static_cast<std::int64_t>(raw_scores.size());
  }
  return ctx;
}

}  // namespace rankbias
