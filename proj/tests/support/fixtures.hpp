#pragma once

// Shared test fixtures: the Venn-diagram example, random generators and
// brute-force oracles that do not reuse any library code paths.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kghier/grouping.hpp"
#include "kghier/ingest.hpp"

namespace kghier::testing {

inline std::filesystem::path data_dir() { return KGHIER_TEST_DATA_DIR; }

// People living in Europe: p1..p6 in Europe, p2..p4 in Ireland, p3 in
// Dublin, p5 and p6 play rugby.
inline std::vector<RawTriple> venn_triples() {
  std::vector<RawTriple> t;
  for (int i = 1; i <= 6; ++i) t.push_back({"p" + std::to_string(i), "LiveIn", "Europe"});
  for (int i = 2; i <= 4; ++i) t.push_back({"p" + std::to_string(i), "LiveIn", "Ireland"});
  t.push_back({"p3", "LiveIn", "Dublin"});
  t.push_back({"p5", "Play", "Rugby"});
  t.push_back({"p6", "Play", "Rugby"});
  return t;
}

// Builds a table straight from member sets, bypassing grouping. Group i is
// named "g<i>" (zero padded) and entity k is labeled "e<k>".
inline GroupTable table_from_sets(const std::vector<std::set<std::uint32_t>>& sets,
                                  std::size_t entity_count, std::size_t alpha = 1) {
  auto entities = std::make_shared<Interner>();
  for (std::size_t k = 0; k < entity_count; ++k) entities->intern("e" + std::to_string(k));
  std::vector<Group> groups;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Group g;
    char name[32];
    std::snprintf(name, sizeof name, "g%04zu", i);
    g.name = name;
    for (auto e : sets[i]) g.members.push_back(EntityId{e});
    groups.push_back(std::move(g));
  }
  return GroupTable(std::move(groups), std::move(entities), alpha);
}

// Random non-empty member sets. A share of the sets are derived from earlier
// ones (exact copies, strict subsets, supersets) so that containment and
// equality actually occur.
inline std::vector<std::set<std::uint32_t>> random_sets(std::mt19937_64& rng, std::size_t groups,
                                                        std::size_t entities) {
  std::uniform_int_distribution<std::uint32_t> entity(0, static_cast<std::uint32_t>(entities - 1));
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, entities / 8));
  std::vector<std::set<std::uint32_t>> sets;
  for (std::size_t i = 0; i < groups; ++i) {
    std::set<std::uint32_t> s;
    const int k = kind(rng);
    if (!sets.empty() && k < 4) {
      const auto& base = sets[std::uniform_int_distribution<std::size_t>(0, sets.size() - 1)(rng)];
      if (k == 0) {
        s = base;
      } else if (k <= 2) {
        for (auto e : base) {
          if (rng() % 4 != 0) s.insert(e);
        }
        if (s.empty()) s.insert(*base.begin());
      } else {
        s = base;
        const std::size_t extra = size(rng) / 2 + 1;
        for (std::size_t n = 0; n < extra; ++n) s.insert(entity(rng));
      }
    } else {
      const std::size_t n = size(rng);
      while (s.size() < n) s.insert(entity(rng));
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

// Random knowledge graph with a planted taxonomy: entities carry a type path
// (level-1 .. level-3 classes) asserted via "isA" with occasional omissions,
// plus uniformly random facts.
inline std::vector<RawTriple> random_graph(std::mt19937_64& rng, std::size_t triple_count,
                                           std::size_t entity_count, std::size_t predicate_count,
                                           std::size_t object_count) {
  std::vector<RawTriple> out;
  out.reserve(triple_count);
  std::uniform_int_distribution<std::size_t> ent(0, entity_count - 1);
  std::uniform_int_distribution<std::size_t> pred(0, predicate_count - 1);
  std::uniform_int_distribution<std::size_t> obj(0, object_count - 1);
  std::uniform_int_distribution<int> branch(0, 3);
  std::bernoulli_distribution keep(0.95);
  for (std::size_t e = 0; e < entity_count && out.size() + 3 <= triple_count / 2; ++e) {
    std::string path = "T" + std::to_string(branch(rng));
    for (int level = 0; level < 3; ++level) {
      if (keep(rng)) out.push_back({"e" + std::to_string(e), "isA", path});
      path += "." + std::to_string(branch(rng));
    }
  }
  while (out.size() < triple_count) {
    out.push_back({"e" + std::to_string(ent(rng)), "r" + std::to_string(pred(rng)),
                   "o" + std::to_string(obj(rng))});
  }
  return out;
}

// Oracle: set-based similarity straight from the definitions.
struct OracleSimilarity {
  std::size_t intersection;
  double jaccard;
  double hpi;
};

inline OracleSimilarity oracle_similarity(const std::set<std::uint32_t>& a,
                                          const std::set<std::uint32_t>& b) {
  std::set<std::uint32_t> inter;
  std::set<std::uint32_t> uni = a;
  for (auto x : a) {
    if (b.count(x)) inter.insert(x);
  }
  for (auto x : b) uni.insert(x);
  return {inter.size(), double(inter.size()) / double(uni.size()),
          double(inter.size()) / double(std::min(a.size(), b.size()))};
}

inline bool oracle_strict_subset(const std::set<std::uint32_t>& small,
                                 const std::set<std::uint32_t>& big) {
  if (small.size() >= big.size()) return false;
  for (auto x : small) {
    if (!big.count(x)) return false;
  }
  return true;
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("kghier_" + tag + "_" + std::to_string(rng() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace kghier::testing
