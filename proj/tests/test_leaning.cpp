/**
 * @file test_leaning.cpp
 * @brief Oracle and property tests for follow-based leaning inference.
 *
 * Frozen weights come from independent arithmetic on the tf-idf formula;
 * the end-to-end fixture plants users whose labels are forced by
 * construction (parallel or orthogonal to one seed aggregate).
 */

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rankbias/leaning.hpp"

using namespace rankbias;
using Catch::Matchers::WithinAbs;

namespace {

// Small politics/music population: u1 follows c1,c2 (politics) and c3
// (music); u2 follows c3; u3 follows c1. Celebrities follow nobody.
FollowGraph smallGraph() {
  return {
      {"u1", {"c1", "c2", "c3"}},
      {"u2", {"c3"}},
      {"u3", {"c1"}},
      {"c1", {}},
      {"c2", {}},
      {"c3", {}},
  };
}

TopicLabels smallLabels() {
  return {{"c1", {"politics"}}, {"c2", {"politics"}}, {"c3", {"music"}}};
}

InterestVector vec(UserId user, std::map<Topic, double> weights) {
  InterestVector v;
  v.user = std::move(user);
  v.weights = std::move(weights);
  return v;
}

}  // namespace

// ── topic frequencies ────────────────────────────────────────────────────

TEST_CASE("topic frequencies count distinct followed accounts per topic") {
  const TopicFrequencyList list =
      build_topic_frequencies(smallGraph(), smallLabels(), "u1", 1);
  CHECK(list.user == "u1");
  REQUIRE(list.entries.size() == 2);
  CHECK(list.entries.at("politics") == 2);
  CHECK(list.entries.at("music") == 1);
  CHECK(validate(list).empty());
}

TEST_CASE("duplicate followings count once") {
  FollowGraph graph = {{"u", {"c1", "c1", "c3", "c3", "c3"}}, {"c1", {}}, {"c3", {}}};
  const TopicFrequencyList list = build_topic_frequencies(graph, smallLabels(), "u", 2);
  CHECK(list.entries.at("politics") == 1);
  CHECK(list.entries.at("music") == 1);
}

TEST_CASE("an account labelled twice with one topic counts it once") {
  FollowGraph graph = {{"u", {"c1"}}, {"c1", {}}};
  TopicLabels labels = {{"c1", {"politics", "politics"}}};
  CHECK(build_topic_frequencies(graph, labels, "u", 1).entries.at("politics") == 1);
}

TEST_CASE("unlabelled followings leave the frequency list empty, not an error") {
  FollowGraph graph = {{"u", {"x1", "x2", "x3"}}, {"x1", {}}, {"x2", {}}, {"x3", {}}};
  const TopicFrequencyList list = build_topic_frequencies(graph, {}, "u", 3);
  CHECK(list.entries.empty());
}

TEST_CASE("users below the followings floor are rejected") {
  CHECK_THROWS_AS(build_topic_frequencies(smallGraph(), smallLabels(), "u2", 2),
                  TooFewFollowings);
  CHECK_THROWS_AS(build_topic_frequencies(smallGraph(), smallLabels(), "ghost", 1),
                  NoFollowings);
  CHECK_THROWS_AS(build_topic_frequencies(smallGraph(), smallLabels(), "c1", 1),
                  NoFollowings);
}

// ── reference statistics and tf-idf ──────────────────────────────────────

TEST_CASE("reference statistics cover the whole graph") {
  const ReferenceStats stats = build_reference_stats(smallGraph(), smallLabels());
  CHECK(stats.population_size == 6);
  REQUIRE(stats.doc_freq.size() == 2);
  CHECK(stats.doc_freq.at("politics") == 2);  // u1, u3
  CHECK(stats.doc_freq.at("music") == 2);     // u1, u2
}

TEST_CASE("tf-idf weight is (1 + ln f) times ln(N / n)") {
  ReferenceStats stats;
  stats.population_size = 1000;
  stats.doc_freq["politics"] = 100;
  TopicFrequencyList freqs;
  freqs.user = "u";
  freqs.entries["politics"] = 3;

  const InterestVector v = tfidf_vector(freqs, stats);
  REQUIRE_THAT(v.weights.at("politics"), WithinAbs(4.8322333718613075, 1e-12));
  REQUIRE_THAT(v.weights.at("politics"),
               WithinAbs((1.0 + std::log(3.0)) * std::log(10.0), 1e-12));
}

TEST_CASE("tf-idf of the small population fixture") {
  const ReferenceStats stats = build_reference_stats(smallGraph(), smallLabels());
  const InterestVector v = tfidf_vector(
      build_topic_frequencies(smallGraph(), smallLabels(), "u1", 1), stats);
  REQUIRE_THAT(v.weights.at("politics"), WithinAbs(1.860112299086919, 1e-12));
  REQUIRE_THAT(v.weights.at("music"), WithinAbs(1.0986122886681098, 1e-12));
  CHECK(validate(v).empty());
}

TEST_CASE("a ubiquitous topic keeps a zero weight") {
  ReferenceStats stats;
  stats.population_size = 50;
  stats.doc_freq["everything"] = 50;
  TopicFrequencyList freqs;
  freqs.user = "u";
  freqs.entries["everything"] = 7;
  const InterestVector v = tfidf_vector(freqs, stats);
  REQUIRE(v.weights.contains("everything"));
  CHECK(v.weights.at("everything") == 0.0);
  CHECK(is_zero_vector(v.weights));
}

TEST_CASE("topics unseen in the reference population are dropped and counted") {
  ReferenceStats stats;
  stats.population_size = 10;
  stats.doc_freq["known"] = 2;
  TopicFrequencyList freqs;
  freqs.user = "u";
  freqs.entries["known"] = 1;
  freqs.entries["alien"] = 4;
  TfidfDiagnostics diag;
  const InterestVector v = tfidf_vector(freqs, stats, &diag);
  CHECK(v.weights.size() == 1);
  CHECK(diag.dropped_topics == 1);
}

TEST_CASE("tf-idf rejects inconsistent reference statistics") {
  ReferenceStats stats;
  stats.population_size = 5;
  stats.doc_freq["t"] = 9;
  TopicFrequencyList freqs;
  freqs.user = "u";
  freqs.entries["t"] = 1;
  CHECK_THROWS_AS(tfidf_vector(freqs, stats), InvalidParams);
  stats.population_size = 0;
  CHECK_THROWS_AS(tfidf_vector(freqs, stats), InvalidParams);
}

// ── seed aggregation ─────────────────────────────────────────────────────

TEST_CASE("seed aggregate sums component-wise and normalizes to total 1") {
  const SeedAggregate agg = aggregate_seed(
      {vec("s1", {{"a", 1.0}, {"b", 1.0}}), vec("s2", {{"b", 2.0}})},
      SeedSide::Democratic);
  CHECK(agg.member_count == 2);
  REQUIRE_THAT(agg.weights.at("a"), WithinAbs(0.25, 1e-15));
  REQUIRE_THAT(agg.weights.at("b"), WithinAbs(0.75, 1e-15));
  CHECK(validate(agg).empty());
}

TEST_CASE("seed aggregation errors") {
  CHECK_THROWS_AS(aggregate_seed({}, SeedSide::Republican), EmptySeedSet);
  CHECK_THROWS_AS(aggregate_seed({vec("s", {{"a", 0.0}})}, SeedSide::Republican),
                  AllZeroVectors);
}

// ── cosine and raw bias ──────────────────────────────────────────────────

TEST_CASE("cosine similarity on sparse vectors") {
  const std::map<Topic, double> a = {{"x", 1.0}, {"y", 1.0}};
  const std::map<Topic, double> x_only = {{"x", 2.0}};
  REQUIRE_THAT(cosine_similarity(a, x_only), WithinAbs(0.7071067811865475, 1e-12));
  CHECK(cosine_similarity(a, a) == 1.0);  // clamped at exact parallelism
  CHECK(cosine_similarity(a, {{"z", 1.0}}) == 0.0);
  CHECK(cosine_similarity(a, {}) == 0.0);
  CHECK(cosine_similarity({{"x", 0.0}}, a) == 0.0);
}

TEST_CASE("raw bias of a vector parallel to one aggregate and orthogonal to the other") {
  const SeedAggregate dem{SeedSide::Democratic, {{"a", 0.5}, {"b", 0.5}}, 3};
  const SeedAggregate rep{SeedSide::Republican, {{"c", 1.0}}, 3};
  CHECK(raw_bias(vec("u", {{"a", 2.0}, {"b", 2.0}}), dem, rep) == 1.0);
  CHECK(raw_bias(vec("u", {{"c", 5.0}}), dem, rep) == -1.0);
}

TEST_CASE("raw bias is antisymmetric under swapping the aggregates' contents") {
  std::mt19937_64 rng(88);
  const std::vector<Topic> topics = {"a", "b", "c", "d", "e"};
  for (int round = 0; round < 50; ++round) {
    auto random_weights = [&] {
      std::map<Topic, double> w;
      for (const auto& t : topics) {
        if (rng() % 2 == 0) w[t] = 1.0 + static_cast<double>(rng() % 100) / 10.0;
      }
      if (w.empty()) w["a"] = 1.0;
      return w;
    };
    const auto wd = random_weights();
    const auto wr = random_weights();
    const SeedAggregate dem{SeedSide::Democratic, wd, 1};
    const SeedAggregate rep{SeedSide::Republican, wr, 1};
    const SeedAggregate dem_swapped{SeedSide::Democratic, wr, 1};
    const SeedAggregate rep_swapped{SeedSide::Republican, wd, 1};
    const InterestVector u = vec("u", random_weights());
    REQUIRE_THAT(raw_bias(u, dem, rep), WithinAbs(-raw_bias(u, dem_swapped, rep_swapped), 1e-12));
  }
}

TEST_CASE("raw bias ignores the scale of the interest vector") {
  const SeedAggregate dem{SeedSide::Democratic, {{"a", 0.7}, {"b", 0.3}}, 2};
  const SeedAggregate rep{SeedSide::Republican, {{"b", 0.2}, {"c", 0.8}}, 2};
  const InterestVector u = vec("u", {{"a", 1.5}, {"b", 0.5}, {"c", 2.0}});
  InterestVector u4 = u, uodd = u;
  for (auto& [t, w] : u4.weights) w *= 4.0;  // power of two: bit-exact
  for (auto& [t, w] : uodd.weights) w *= 3.7;
  const double base = raw_bias(u, dem, rep);
  CHECK(raw_bias(u4, dem, rep) == base);
  REQUIRE_THAT(raw_bias(uodd, dem, rep), WithinAbs(base, 1e-12));
  CHECK(base >= -1.0);
  CHECK(base <= 1.0);
}

TEST_CASE("raw bias stays within [-1,1] on random non-negative vectors") {
  std::mt19937_64 rng(301);
  const std::vector<Topic> topics = {"t1", "t2", "t3", "t4", "t5", "t6"};
  for (int round = 0; round < 200; ++round) {
    auto random_vec = [&] {
      std::map<Topic, double> w;
      for (const auto& t : topics) {
        if (rng() % 3 != 0) w[t] = static_cast<double>(rng() % 1000) / 100.0 + 0.01;
      }
      if (w.empty()) w["t1"] = 1.0;
      return w;
    };
    const SeedAggregate dem{SeedSide::Democratic, random_vec(), 1};
    const SeedAggregate rep{SeedSide::Republican, random_vec(), 1};
    const double r = raw_bias(vec("u", random_vec()), dem, rep);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("raw bias guards its inputs") {
  const SeedAggregate dem{SeedSide::Democratic, {{"a", 1.0}}, 1};
  const SeedAggregate rep{SeedSide::Republican, {{"b", 1.0}}, 1};
  CHECK_THROWS_AS(raw_bias(vec("u", {}), dem, rep), UninferableBias);
  CHECK_THROWS_AS(raw_bias(vec("u", {{"a", 0.0}}), dem, rep), UninferableBias);
  CHECK_THROWS_AS(raw_bias(vec("u", {{"a", 1.0}}), rep, dem), InvalidParams);
  const SeedAggregate zero{SeedSide::Republican, {{"b", 0.0}}, 1};
  CHECK_THROWS_AS(raw_bias(vec("u", {{"a", 1.0}}), dem, zero), AllZeroVectors);
}

TEST_CASE("cosine similarity is unchanged when the idf log base changes") {
  // Switching the idf base rescales a whole vector by 1/ln(base), which
  // cosine cannot see. The tf smoothing is a different story, so only the
  // idf factor may float.
  std::mt19937_64 rng(1207);
  const double N = 500.0;
  for (int round = 0; round < 50; ++round) {
    std::map<Topic, double> nat_u, ten_u, nat_d, ten_d;
    for (int t = 0; t < 8; ++t) {
      const Topic topic = "t" + std::to_string(t);
      const double n = 1.0 + static_cast<double>(rng() % 400);
      const double fu = 1.0 + static_cast<double>(rng() % 20);
      const double fd = 1.0 + static_cast<double>(rng() % 20);
      if (rng() % 3 != 0) {
        nat_u[topic] = (1.0 + std::log(fu)) * std::log(N / n);
        ten_u[topic] = (1.0 + std::log(fu)) * std::log10(N / n);
      }
      if (rng() % 3 != 0) {
        nat_d[topic] = (1.0 + std::log(fd)) * std::log(N / n);
        ten_d[topic] = (1.0 + std::log(fd)) * std::log10(N / n);
      }
    }
    REQUIRE_THAT(cosine_similarity(nat_u, nat_d),
                 WithinAbs(cosine_similarity(ten_u, ten_d), 1e-12));
  }
}

// ── normalization and discretization ─────────────────────────────────────

TEST_CASE("normalization rescales by max absolute raw and clamps") {
  const NormalizationParams params{2.0, "pop"};
  CHECK(normalize_bias(0.5, params).value == 0.25);
  CHECK(normalize_bias(-0.5, params).value == -0.25);
  CHECK(normalize_bias(0.0, params).value == 0.0);
  CHECK(normalize_bias(3.0, params).value == 1.0);
  CHECK(normalize_bias(-3.0, params).value == -1.0);
  CHECK_THROWS_AS(normalize_bias(0.1, NormalizationParams{0.0, ""}), InvalidParams);
  CHECK_THROWS_AS(normalize_bias(0.1, NormalizationParams{-1.0, ""}), InvalidParams);
}

TEST_CASE("normalization preserves order") {
  const NormalizationParams params{0.4, "pop"};
  std::mt19937_64 rng(66);
  for (int round = 0; round < 200; ++round) {
    const double a = (static_cast<double>(rng() % 2001) - 1000.0) / 1000.0;
    const double b = (static_cast<double>(rng() % 2001) - 1000.0) / 1000.0;
    if (a < b) {
      CHECK(normalize_bias(a, params).value <= normalize_bias(b, params).value);
    }
  }
}

TEST_CASE("normalization fit uses the max absolute raw score") {
  const NormalizationParams p = fit_normalization({0.2, -0.5, 0.1}, "pop-a");
  CHECK(p.max_abs_raw == 0.5);
  CHECK(p.population_id == "pop-a");
  CHECK(fit_normalization({0.0, 0.0}, "flat").max_abs_raw == 1.0);
  CHECK_THROWS_AS(fit_normalization({}, "none"), EmptyInput);
}

TEST_CASE("discretization splits on the neutral zone boundaries") {
  CHECK(discretize(BiasScore{-0.03}, 0.03) == LeaningLabel::Republican);
  CHECK(discretize(BiasScore{-0.0299}, 0.03) == LeaningLabel::Neutral);
  CHECK(discretize(BiasScore{0.0}, 0.03) == LeaningLabel::Neutral);
  CHECK(discretize(BiasScore{0.0299}, 0.03) == LeaningLabel::Neutral);
  CHECK(discretize(BiasScore{0.03}, 0.03) == LeaningLabel::Democratic);
  CHECK(discretize(BiasScore{-1.0}, 0.03) == LeaningLabel::Republican);
  CHECK(discretize(BiasScore{1.0}, 0.03) == LeaningLabel::Democratic);
  CHECK_THROWS_AS(discretize(BiasScore{0.0}, -0.1), InvalidParams);
  CHECK_THROWS_AS(discretize(BiasScore{0.0}, 1.5), InvalidParams);
}

TEST_CASE("discretization mirrors under sign flip") {
  auto mirror = [](LeaningLabel l) {
    if (l == LeaningLabel::Democratic) return LeaningLabel::Republican;
    if (l == LeaningLabel::Republican) return LeaningLabel::Democratic;
    return l;
  };
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    const double s = (static_cast<double>(rng() % 2001) - 1000.0) / 1000.0;
    CHECK(discretize(BiasScore{-s}, 0.03) == mirror(discretize(BiasScore{s}, 0.03)));
  }
}

// ── end-to-end inference ─────────────────────────────────────────────────

namespace {

// Two disjoint two-topic vocabularies; ud mirrors the democratic seed,
// ur the republican one, un straddles both symmetrically.
FollowGraph plantedGraph() {
  return {
      {"d1", {}}, {"d2", {}}, {"r1", {}}, {"r2", {}}, {"x1", {}}, {"x2", {}},
      {"sd", {"d1", "d2"}},  {"sr", {"r1", "r2"}},
      {"ud", {"d1", "d2"}},  {"ur", {"r1", "r2"}},
      {"un", {"d1", "r1"}},  {"uthin", {"x1"}},  // unlabelled follow keeps doc-freqs symmetric
      {"uz", {"x1", "x2"}},
  };
}

TopicLabels plantedLabels() {
  return {{"d1", {"economy"}}, {"d2", {"healthcare"}}, {"r1", {"guns"}}, {"r2", {"taxes"}}};
}

}  // namespace

TEST_CASE("planted users come back with their planted leanings") {
  ContextBuildInfo info;
  const InferenceContext ctx = build_inference_context(
      plantedGraph(), plantedLabels(), {"sd"}, {"sr"}, 0.03, 2, "planted", &info);
  CHECK(info.dem_seeds_used == 1);
  CHECK(info.rep_seeds_used == 1);
  CHECK(validate(ctx.dem).empty());
  CHECK(validate(ctx.rep).empty());
  CHECK(validate(ctx.norm).empty());

  const InferenceResult ud = infer_user("ud", plantedGraph(), plantedLabels(), ctx);
  CHECK(ud.label == LeaningLabel::Democratic);
  REQUIRE(ud.raw.has_value());
  REQUIRE_THAT(*ud.raw, WithinAbs(1.0, 1e-12));

  const InferenceResult ur = infer_user("ur", plantedGraph(), plantedLabels(), ctx);
  CHECK(ur.label == LeaningLabel::Republican);
  REQUIRE_THAT(*ur.raw, WithinAbs(-1.0, 1e-12));

  const InferenceResult un = infer_user("un", plantedGraph(), plantedLabels(), ctx);
  CHECK(un.label == LeaningLabel::Neutral);
  REQUIRE_THAT(*un.raw, WithinAbs(0.0, 1e-12));
}

TEST_CASE("thin, empty, and unlabelled users are uninferable with a reason") {
  const InferenceContext ctx = build_inference_context(
      plantedGraph(), plantedLabels(), {"sd"}, {"sr"}, 0.03, 2, "planted");

  const InferenceResult thin = infer_user("uthin", plantedGraph(), plantedLabels(), ctx);
  CHECK(thin.label == LeaningLabel::Uninferable);
  CHECK(thin.note == "fewer than 2 followings");
  CHECK_FALSE(thin.raw.has_value());

  const InferenceResult ghost = infer_user("ghost", plantedGraph(), plantedLabels(), ctx);
  CHECK(ghost.label == LeaningLabel::Uninferable);
  CHECK(ghost.note == "no followings");

  const InferenceResult celeb = infer_user("d1", plantedGraph(), plantedLabels(), ctx);
  CHECK(celeb.label == LeaningLabel::Uninferable);
  CHECK(celeb.note == "no followings");

  const InferenceResult zero = infer_user("uz", plantedGraph(), plantedLabels(), ctx);
  CHECK(zero.label == LeaningLabel::Uninferable);
  CHECK(zero.note == "zero interest vector");
}

TEST_CASE("context building rejects a side with no usable seeds") {
  CHECK_THROWS_AS(build_inference_context(plantedGraph(), plantedLabels(), {"uthin"},
                                          {"sr"}, 0.03, 2, "planted"),
                  EmptySeedSet);
  CHECK_THROWS_AS(build_inference_context(plantedGraph(), plantedLabels(), {}, {"sr"},
                                          0.03, 2, "planted"),
                  EmptySeedSet);
  CHECK_THROWS_AS(build_inference_context(plantedGraph(), plantedLabels(), {"sd"}, {"sr"},
                                          0.03, 0, "planted"),
                  InvalidParams);
}
