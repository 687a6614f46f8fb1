#include <gtest/gtest.h>

#include <random>
#include <set>

#include "kghier/error.hpp"
#include "kghier/similarity.hpp"
#include "support/fixtures.hpp"

namespace kghier {
namespace {

std::vector<EntityId> ids(std::initializer_list<std::uint32_t> xs) {
  std::vector<EntityId> out;
  for (auto x : xs) out.push_back(EntityId{x});
  return out;
}

GroupTable venn_table() {
  return generate_groups(make_triple_set(testing::venn_triples()), {.alpha = 1});
}

std::set<std::uint32_t> as_set(const Group& g) {
  std::set<std::uint32_t> out;
  for (auto e : g.members) out.insert(raw(e));
  return out;
}

std::set<std::pair<std::string, std::string>> record_names(const GroupTable& t,
                                                           const SimilarityMatrix& m) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& r : m.records) {
    auto a = t[r.first].name;
    auto b = t[r.second].name;
    if (b < a) std::swap(a, b);
    out.emplace(a, b);
  }
  return out;
}

TEST(PairSimilarity, EuropeIreland) {
  const auto table = venn_table();
  const auto& europe = table[*table.find("LiveIn_Europe")];
  const auto& ireland = table[*table.find("LiveIn_Ireland")];
  const auto s = pair_similarity(europe.members, ireland.members);
  // HPI = |{p2,p3,p4}| / min(3, 6) = 1.
  EXPECT_EQ(s.intersection, 3u);
  EXPECT_EQ(s.hpi, 1.0);
  // Oracle: direct set computation over the membership sets.
  const auto oracle = testing::oracle_similarity(as_set(europe), as_set(ireland));
  EXPECT_EQ(oracle.jaccard, 0.5);
  EXPECT_EQ(s.jaccard, oracle.jaccard);
}

TEST(PairSimilarity, IdenticalAndDisjoint) {
  const auto same = pair_similarity(ids({1, 2, 3}), ids({1, 2, 3}));
  EXPECT_EQ(same.jaccard, 1.0);
  EXPECT_EQ(same.hpi, 1.0);
  const auto none = pair_similarity(ids({1, 2}), ids({3, 4, 5}));
  EXPECT_EQ(none.intersection, 0u);
  EXPECT_EQ(none.jaccard, 0.0);
  EXPECT_EQ(none.hpi, 0.0);
}

TEST(PairSimilarity, EmptyInputIsPreconditionError) {
  EXPECT_THROW(pair_similarity({}, ids({1})), PreconditionError);
  EXPECT_THROW(pair_similarity(ids({1}), {}), PreconditionError);
}

TEST(PairSimilarityProperty, SymmetricBoundedAndMatchesOracle) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 2000; ++round) {
    const auto sets = testing::random_sets(rng, 2, 40);
    std::vector<EntityId> a;
    std::vector<EntityId> b;
    for (auto e : sets[0]) a.push_back(EntityId{e});
    for (auto e : sets[1]) b.push_back(EntityId{e});
    const auto ab = pair_similarity(a, b);
    const auto ba = pair_similarity(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(0.0, ab.jaccard);
    EXPECT_LE(ab.jaccard, ab.hpi);
    EXPECT_LE(ab.hpi, 1.0);
    const auto oracle = testing::oracle_similarity(sets[0], sets[1]);
    EXPECT_EQ(ab.intersection, oracle.intersection);
    EXPECT_DOUBLE_EQ(ab.jaccard, oracle.jaccard);
    EXPECT_DOUBLE_EQ(ab.hpi, oracle.hpi);
    // hpi == 1 exactly when the smaller set is inside the larger one.
    const bool subset = std::includes(sets[0].begin(), sets[0].end(), sets[1].begin(), sets[1].end()) ||
                        std::includes(sets[1].begin(), sets[1].end(), sets[0].begin(), sets[0].end());
    EXPECT_EQ(ab.hpi == 1.0, subset);
    // jaccard == hpi iff the sets are equal or disjoint.
    EXPECT_EQ(ab.jaccard == ab.hpi, sets[0] == sets[1] || ab.intersection == 0);
  }
}

TEST(AllPairs, VennOverlappingPairs) {
  const auto table = venn_table();
  // Hand enumeration: of the 6 pairs only Ireland-Rugby, Dublin-Rugby do not overlap.
  const std::set<std::pair<std::string, std::string>> expected{
      {"LiveIn_Europe", "LiveIn_Ireland"},
      {"LiveIn_Dublin", "LiveIn_Europe"},
      {"LiveIn_Europe", "Play_Rugby"},
      {"LiveIn_Dublin", "LiveIn_Ireland"},
  };
  const auto brute = all_pairs_bruteforce(table, 1);
  const auto indexed = all_pairs_indexed(table, 1);
  EXPECT_EQ(record_names(table, brute), expected);
  EXPECT_EQ(brute, indexed);
  EXPECT_EQ(brute.group_count, 4u);
}

TEST(AllPairs, SingleGroupAndDisjointTables) {
  const auto single = testing::table_from_sets({{1, 2, 3}}, 5);
  EXPECT_TRUE(all_pairs_bruteforce(single, 4).records.empty());
  EXPECT_TRUE(all_pairs_indexed(single, 4).records.empty());
  const auto disjoint = testing::table_from_sets({{0, 1}, {2}, {3, 4}}, 5);
  EXPECT_TRUE(all_pairs_bruteforce(disjoint, 2).records.empty());
  EXPECT_TRUE(all_pairs_indexed(disjoint, 2).records.empty());
}

TEST(AllPairs, RecordsCanonicalAndOverlapping) {
  std::mt19937_64 rng(17);
  const auto table = testing::table_from_sets(testing::random_sets(rng, 60, 300), 300);
  const auto m = all_pairs_indexed(table, 3);
  for (std::size_t k = 0; k < m.records.size(); ++k) {
    const auto& r = m.records[k];
    EXPECT_LT(r.first, r.second);
    EXPECT_GT(r.intersection, 0u);
    if (k > 0) {
      const auto& p = m.records[k - 1];
      EXPECT_TRUE(p.first < r.first || (p.first == r.first && p.second < r.second));
    }
  }
}

TEST(AllPairsProperty, EnginesAgreeForAnyJobCount) {
  std::mt19937_64 rng(123);
  for (int round = 0; round < 40; ++round) {
    const std::size_t entities = 50 + rng() % 500;
    const std::size_t groups = 2 + rng() % 80;
    const auto table = testing::table_from_sets(testing::random_sets(rng, groups, entities), entities);
    const auto reference = all_pairs_bruteforce(table, 1);
    for (std::size_t jobs : {1u, 2u, 3u, 8u}) {
      EXPECT_EQ(all_pairs_bruteforce(table, jobs), reference) << "jobs=" << jobs;
      EXPECT_EQ(all_pairs_indexed(table, jobs), reference) << "jobs=" << jobs;
    }
  }
}

TEST(MatrixCsv, HeaderAndSortedRows) {
  const auto table = venn_table();
  const auto csv = matrix_to_csv(table, all_pairs_indexed(table, 2));
  const std::string expected_prefix = "group1,group2,intersection,jaccard,hpi\n";
  ASSERT_EQ(csv.substr(0, expected_prefix.size()), expected_prefix);
  // Four rows, sorted by group1 then group2 display name.
  std::vector<std::string> lines;
  std::size_t start = expected_prefix.size();
  while (start < csv.size()) {
    const auto end = csv.find('\n', start);
    lines.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
  EXPECT_NE(csv.find(",3,0.5,1\n"), std::string::npos);
}

TEST(MatrixCsv, RoundTripAndQuoting) {
  std::mt19937_64 rng(8);
  const std::vector<RawTriple> tricky{{"a", "p,q", "\"x\""}, {"b", "p,q", "\"x\""},
                                      {"a", "r", "y"},       {"b", "r", "y"},
                                      {"c", "r", "y"}};
  const auto table = generate_groups(make_triple_set(tricky), {.alpha = 1});
  const auto matrix = all_pairs_indexed(table, 1);
  EXPECT_EQ(matrix_from_csv(table, matrix_to_csv(table, matrix)), matrix);

  const auto big = testing::table_from_sets(testing::random_sets(rng, 50, 200), 200);
  const auto m = all_pairs_indexed(big, 2);
  EXPECT_EQ(matrix_from_csv(big, matrix_to_csv(big, m)), m);
}

TEST(MatrixCsv, RejectsInconsistentInput) {
  const auto table = venn_table();
  const std::string header = "group1,group2,intersection,jaccard,hpi\n";
  EXPECT_THROW(matrix_from_csv(table, "a,b,c\n"), IntegrityError);
  EXPECT_THROW(matrix_from_csv(table, header + "Nope,LiveIn_Europe,1,0.1,1\n"), IntegrityError);
  EXPECT_THROW(matrix_from_csv(table, header + "LiveIn_Europe,LiveIn_Dublin,2,0.2,2\n"),
               IntegrityError);
  EXPECT_THROW(matrix_from_csv(table, header + "LiveIn_Europe,LiveIn_Ireland,3,0.9,1\n"),
               IntegrityError);
  EXPECT_THROW(matrix_from_csv(table, header + "LiveIn_Europe,LiveIn_Ireland,3,0.5,1\n"
                                               "LiveIn_Ireland,LiveIn_Europe,3,0.5,1\n"),
               IntegrityError);
}

TEST(Engine, ParseNames) {
  EXPECT_EQ(parse_engine("indexed"), SimilarityEngine::kIndexed);
  EXPECT_EQ(parse_engine("bruteforce"), SimilarityEngine::kBruteForce);
  EXPECT_THROW(parse_engine("minhash"), ConfigError);
}

}  // namespace
}  // namespace kghier
