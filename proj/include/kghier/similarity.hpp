#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kghier/grouping.hpp"

namespace kghier {

struct PairSimilarity {
  std::size_t intersection = 0;
  double jaccard = 0.0;  // |A∩B| / |A∪B|
  double hpi = 0.0;      // hub promoted index: |A∩B| / min(|A|, |B|)

  friend bool operator==(const PairSimilarity&, const PairSimilarity&) = default;
};

// Both ratios from exact counts. Throws PreconditionError if either size is 0
// or the intersection exceeds the smaller size.
PairSimilarity similarity_from_counts(std::size_t intersection, std::size_t size1,
                                      std::size_t size2);

// Both inputs must be non-empty and strictly ascending.
PairSimilarity pair_similarity(std::span<const EntityId> members1,
                               std::span<const EntityId> members2);

// One unordered pair of groups, identified by table index with first < second.
struct SimilarityRecord {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  std::size_t intersection = 0;
  double jaccard = 0.0;
  double hpi = 0.0;

  friend bool operator==(const SimilarityRecord&, const SimilarityRecord&) = default;
};

// Records for every overlapping pair, sorted by (first, second). Pairs with
// an empty intersection are implicit.
struct SimilarityMatrix {
  std::vector<SimilarityRecord> records;
  std::size_t group_count = 0;

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;
};

enum class SimilarityEngine { kIndexed, kBruteForce };

SimilarityEngine parse_engine(std::string_view name);

// Evaluates every unordered pair. Pairs are enumerated in lexicographic
// (i, j) order and cut into `jobs` contiguous ranges.
SimilarityMatrix all_pairs_bruteforce(const GroupTable& table, std::size_t jobs);

// Inverted index entity -> groups; each worker owns a contiguous range of
// entities and counts co-occurring pairs. Equal to all_pairs_bruteforce.
SimilarityMatrix all_pairs_indexed(const GroupTable& table, std::size_t jobs);

SimilarityMatrix all_pairs(const GroupTable& table, SimilarityEngine engine, std::size_t jobs);

// CSV with header "group1,group2,intersection,jaccard,hpi"; rows sorted by
// (group1, group2) display name.
std::string matrix_to_csv(const GroupTable& table, const SimilarityMatrix& matrix);
void write_matrix_csv(const GroupTable& table, const SimilarityMatrix& matrix,
                      const std::filesystem::path& path);

// Reads a CSV produced by matrix_to_csv against `table`. Ratios are
// recomputed from the table's sizes; unknown names or inconsistent values
// raise IntegrityError.
SimilarityMatrix matrix_from_csv(const GroupTable& table, const std::string& text);
SimilarityMatrix read_matrix_csv(const GroupTable& table, const std::filesystem::path& path);

}  // namespace kghier
