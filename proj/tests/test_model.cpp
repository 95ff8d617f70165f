/**
 * @file test_model.cpp
 * @brief Validation and equality semantics of the core value types.
 */

#include <catch2/catch_amalgamated.hpp>

#include "rankbias/model.hpp"

using namespace rankbias;

namespace {

Item makeItem(ItemId id, UserId author, double bias) {
  Item it;
  it.id = std::move(id);
  it.author = std::move(author);
  it.source_bias = BiasScore{bias};
  return it;
}

}  // namespace

TEST_CASE("bias score validation flags out-of-range values") {
  CHECK(validate(BiasScore{0.0}).empty());
  CHECK(validate(BiasScore{1.0}).empty());
  CHECK(validate(BiasScore{-1.0}).empty());

  auto violations = validate(BiasScore{1.2});
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "value out of [-1,1]");

  CHECK_FALSE(validate(BiasScore{-1.0000001}).empty());
  CHECK_FALSE(validate(BiasScore{std::nan("")}).empty());
}

TEST_CASE("leaning labels round-trip through their string form") {
  for (auto label : {LeaningLabel::Democratic, LeaningLabel::Republican,
                     LeaningLabel::Neutral, LeaningLabel::Uninferable}) {
    auto parsed = parse_leaning_label(to_string(label));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == label);
  }
  CHECK_FALSE(parse_leaning_label("left").has_value());
  CHECK_FALSE(parse_leaning_label("").has_value());
}

TEST_CASE("topic folding lower-cases ASCII bytes only") {
  CHECK(fold_topic("Politics") == "politics");
  CHECK(fold_topic("MUSIC") == "music");
  CHECK(fold_topic("tea party") == "tea party");
  CHECK(fold_topic("2016") == "2016");
}

TEST_CASE("item validation") {
  CHECK(validate(makeItem("t1", "u1", 0.5)).empty());

  Item bad;
  bad.retweet_count = -1;
  auto violations = validate(bad);
  CHECK(std::count(violations.begin(), violations.end(), "empty item id") == 1);
  CHECK(std::count(violations.begin(), violations.end(), "empty author id") == 1);
  CHECK(std::count(violations.begin(), violations.end(), "negative retweet_count") == 1);

  Item out_of_range = makeItem("t2", "u2", 1.5);
  auto v2 = validate(out_of_range);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0] == "source_bias: value out of [-1,1]");
}

TEST_CASE("snapshot validation catches duplicates and oversized pages") {
  RankedSnapshot snap;
  snap.query = "q";
  snap.ranked_items = {"a", "b", "a"};
  auto violations = validate(snap);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "duplicate item in ranked list");

  RankedSnapshot big;
  big.query = "q";
  for (int i = 0; i < 21; ++i) big.ranked_items.push_back("t" + std::to_string(i));
  CHECK_FALSE(validate(big).empty());
  CHECK(validate(big, 25).empty());

  RankedSnapshot anon;
  anon.ranked_items = {"a"};
  auto v3 = validate(anon);
  REQUIRE(v3.size() == 1);
  CHECK(v3[0] == "empty query id");
}

TEST_CASE("corpus validation catches duplicates") {
  InputCorpus corpus;
  corpus.query = "q";
  corpus.items = {"a", "b", "c"};
  CHECK(validate(corpus).empty());

  corpus.items.push_back("b");
  CHECK_FALSE(validate(corpus).empty());
}

TEST_CASE("bias report validation ties trb to tob - tib") {
  BiasReport report;
  report.query = "q";
  report.tib = BiasScore{0.03};
  report.tob = BiasScore{0.21};
  report.trb = 0.21 - 0.03;
  report.snapshot_count = 10;
  report.scored_item_fraction = 0.9;
  CHECK(validate(report).empty());

  report.trb = 0.2;
  auto violations = validate(report);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "trb does not equal tob - tib");

  report.trb = 2.5;
  CHECK(validate(report).size() == 2);
}

TEST_CASE("equality is structural") {
  Item a = makeItem("t1", "u1", 0.25);
  Item b = makeItem("t1", "u1", 0.25);
  CHECK(a == b);
  b.favorite_count = 1;
  CHECK(a != b);

  RankedSnapshot s1{"q", 100, {"a", "b"}};
  RankedSnapshot s2{"q", 100, {"a", "b"}};
  CHECK(s1 == s2);
  s2.ranked_items = {"b", "a"};
  CHECK(s1 != s2);
}
