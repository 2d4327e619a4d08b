#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bicsi/matcher.hpp"
#include "support/oracles.hpp"

using namespace bicsi;

namespace {

GeneSequence g(const char *bits) { return GeneSequence::from_string(bits); }

AncestorPair same(const char *bits) { return {g(bits), g(bits)}; }

ParentSequence ps(const char *bits) { return {g(bits), 0}; }

}  // namespace

TEST(MatchOne, ExactMatchOnFirstAncestor) {
  FingerprintDb db(2, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("0000")}});
  db.add_position({"B", {1, 2}, {{g("1011"), g("0000")}}});
  // B's second ancestor equals A's; A still wins the tie at distance 0.
  auto r = match_one(ps("0000"), db, MetricKind::hamming);
  EXPECT_EQ(r.predicted_index, 0u);
  r = match_one(ps("1011"), db, MetricKind::hamming);
  EXPECT_EQ(r.predicted_index, 1u);
  EXPECT_EQ(r.predicted_label, "B");
  EXPECT_EQ(r.predicted_coord, (Coord{1, 2}));
  EXPECT_EQ(r.best_distance, 0.0);
}

TEST(MatchOne, TieGoesToLowerIndex) {
  FingerprintDb db(2, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("1100")}});
  db.add_position({"B", {1, 0}, {same("0011")}});
  const auto r = match_one(ps("1010"), db, MetricKind::hamming);
  EXPECT_EQ(r.predicted_index, 0u);
  EXPECT_EQ(r.best_distance, 2.0);
  EXPECT_EQ(r.runner_up_margin, 0.0);
}

TEST(MatchOne, HandBuiltDistancesFourOneSeven) {
  // Parent is all zeros; entries carry 4, 1 and 7 ones.
  FingerprintDb db(4, kDefaultThresholdMicro);
  db.add_position({"far", {0, 0}, {same("11110000")}});
  db.add_position({"near", {1, 0}, {same("00000001")}});
  db.add_position({"farthest", {2, 0}, {same("11111110")}});
  const auto r = match_one(ps("00000000"), db, MetricKind::hamming);
  EXPECT_EQ(r.predicted_label, "near");
  EXPECT_EQ(r.best_distance, 1.0);
  EXPECT_EQ(r.runner_up_margin, 3.0);
}

TEST(MatchOne, SingleEntryMarginIsZero) {
  FingerprintDb db(1, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("10")}});
  EXPECT_EQ(match_one(ps("01"), db, MetricKind::hamming).runner_up_margin, 0.0);
}

TEST(MatchOne, Errors) {
  const FingerprintDb empty(2, kDefaultThresholdMicro);
  EXPECT_THROW(match_one(ps("0000"), empty, MetricKind::hamming), LookupError);
  FingerprintDb db(2, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("0000")}});
  EXPECT_THROW(match_one(ps("00"), db, MetricKind::hamming), LengthMismatchError);
}

TEST(MatchOne, ExtraSetNeverIncreasesDistance) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 1 + rng() % 16;
    FingerprintDb db(k, kDefaultThresholdMicro);
    for (int e = 0; e < 3; ++e) {
      db.add_position({"E" + std::to_string(e), {e * 1.0, 0},
                       {{oracle::random_gene(rng, k), oracle::random_gene(rng, k)}}});
    }
    const ParentSequence p{oracle::random_gene(rng, k), 0};
    const auto before = match_one(p, db, MetricKind::hamming);
    const auto after = match_one(
        p,
        append_ancestor_set(db, "E2", {oracle::random_gene(rng, k), oracle::random_gene(rng, k)}),
        MetricKind::hamming);
    ASSERT_LE(after.best_distance, before.best_distance);
  }
}

TEST(MatchOne, AgreesWithBruteForce) {
  std::mt19937_64 rng(52);
  int ties = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + rng() % 8;
    const std::size_t n_entries = 1 + rng() % 8;
    FingerprintDb db(k, kDefaultThresholdMicro);
    std::vector<std::vector<oracle::Bits>> flat;
    for (std::size_t e = 0; e < n_entries; ++e) {
      PositionEntry pe{"E" + std::to_string(e), {static_cast<double>(e), 0}, {}};
      std::vector<oracle::Bits> anc;
      const std::size_t sets = 1 + rng() % 3;
      for (std::size_t s = 0; s < sets; ++s) {
        const auto a = oracle::random_bits(rng, 2 * k);
        const auto b = oracle::random_bits(rng, 2 * k);
        pe.ancestor_sets.push_back({oracle::gene_of(a), oracle::gene_of(b)});
        anc.push_back(a);
        anc.push_back(b);
      }
      db.add_position(std::move(pe));
      flat.push_back(std::move(anc));
    }
    const auto parent = oracle::random_bits(rng, 2 * k);
    const ParentSequence p{oracle::gene_of(parent), static_cast<std::size_t>(t)};

    const auto h = oracle::brute_match(parent, flat, [](const auto &x, const auto &y) {
      return static_cast<double>(oracle::hamming(x, y));
    });
    ties += h.margin == 0.0 && n_entries > 1;
    for (MetricKind kind : {MetricKind::hamming, MetricKind::manhattan, MetricKind::euclidean}) {
      const auto r = match_one(p, db, kind);
      ASSERT_EQ(r.predicted_index, h.index) << metric_name(kind);
      ASSERT_EQ(r.window_index, static_cast<std::size_t>(t));
    }
    const auto r = match_one(p, db, MetricKind::hamming);
    ASSERT_EQ(r.best_distance, h.best);
    ASSERT_EQ(r.runner_up_margin, h.margin);

    const auto c = oracle::brute_match(parent, flat, [](const auto &x, const auto &y) {
      return 1.0 - oracle::cosine(x, y);
    });
    ASSERT_EQ(match_one(p, db, MetricKind::cosine).predicted_index, c.index);
    const auto j = oracle::brute_match(parent, flat, [](const auto &x, const auto &y) {
      return 1.0 - oracle::jaccard(x, y);
    });
    ASSERT_EQ(match_one(p, db, MetricKind::jaccard).predicted_index, j.index);
  }
  EXPECT_GT(ties, 50);
}

TEST(MatchTrace, OrderEmptyAndDeterminism) {
  FingerprintDb db(2, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("0000")}});
  db.add_position({"B", {1, 0}, {same("1111")}});
  std::vector<ParentSequence> parents;
  for (std::size_t i = 0; i < 200; ++i) parents.push_back({g(i % 2 ? "1110" : "0001"), i});
  const auto rs = match_trace(parents, db, MetricKind::hamming);
  ASSERT_EQ(rs.size(), 200u);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(rs[i].window_index, i);
    EXPECT_EQ(rs[i].predicted_index, i % 2);
  }
  EXPECT_EQ(match_trace(parents, db, MetricKind::hamming), rs);
  EXPECT_TRUE(match_trace({}, db, MetricKind::hamming).empty());
}

TEST(MatchTrace, ReportsFailingWindow) {
  FingerprintDb db(2, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {same("0000")}});
  const std::vector<ParentSequence> parents{{g("0000"), 0}, {g("0000"), 1}, {g("00"), 2}};
  try {
    match_trace(parents, db, MetricKind::hamming);
    FAIL() << "expected MatchError";
  } catch (const MatchError &e) {
    EXPECT_EQ(e.window_index(), 2u);
  }
}
