#include "kghier/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include "kghier/error.hpp"

namespace kghier {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) x = std::exchange(parent_[x], root);
    return root;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Fixed-size bit set, one word per 64 nodes.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  Bits& operator|=(const Bits& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace

bool hpi_at_least(const SimilarityRecord& record, std::size_t size1, std::size_t size2,
                  double theta) {
  if (theta >= 1.0) return record.intersection == std::min(size1, size2);
  return record.hpi >= theta;
}

bool near_equal(const SimilarityRecord& record, std::size_t size1, std::size_t size2,
                double theta) {
  if (theta >= 1.0) return size1 == size2 && record.intersection == size1;
  return record.jaccard >= theta || (size1 == size2 && record.hpi >= theta);
}

void check_inputs(const GroupTable& table, const SimilarityMatrix& matrix, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ConfigError("theta must be in (0, 1], got " + std::to_string(theta));
  }
  if (matrix.group_count != table.size()) {
    throw IntegrityError("similarity matrix covers " + std::to_string(matrix.group_count) +
                         " groups but the table has " + std::to_string(table.size()));
  }
  for (const auto& r : matrix.records) {
    if (r.first >= r.second || r.second >= table.size()) {
      throw IntegrityError("similarity record references unknown group pair (" +
                           std::to_string(r.first) + ", " + std::to_string(r.second) + ")");
    }
    const std::size_t smaller = std::min(table[r.first].size(), table[r.second].size());
    if (r.intersection == 0 || r.intersection > smaller) {
      throw IntegrityError("similarity record (" + table[r.first].name + ", " +
                           table[r.second].name + ") has an impossible intersection");
    }
  }
}

Equivalence find_equivalences(const GroupTable& table, const SimilarityMatrix& matrix,
                              double theta) {
  DisjointSet sets(table.size());
  for (const auto& r : matrix.records) {
    if (near_equal(r, table[r.first].size(), table[r.second].size(), theta)) {
      sets.unite(r.first, r.second);
    }
  }

  std::vector<std::vector<std::size_t>> classes(table.size());
  for (std::size_t g = 0; g < table.size(); ++g) classes[sets.find(g)].push_back(g);

  Equivalence eq;
  for (auto& members : classes) {
    if (members.empty()) continue;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return table[a].name < table[b].name; });
    HierarchyNode node;
    node.representative = members.front();
    node.name = table[node.representative].name;
    node.member_count = table[node.representative].size();
    node.aliases = std::move(members);
    eq.nodes.push_back(std::move(node));
  }
  std::sort(eq.nodes.begin(), eq.nodes.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });

  eq.node_of_group.assign(table.size(), 0);
  for (std::size_t n = 0; n < eq.nodes.size(); ++n) {
    for (std::size_t g : eq.nodes[n].aliases) eq.node_of_group[g] = n;
  }
  return eq;
}

std::vector<Edge> containment_edges(const GroupTable& table, const SimilarityMatrix& matrix,
                                    const Equivalence& eq, double theta) {
  std::vector<Edge> edges;
  for (const auto& r : matrix.records) {
    const std::size_t a = eq.node_of_group[r.first];
    const std::size_t b = eq.node_of_group[r.second];
    if (a == b) continue;
    if (!hpi_at_least(r, table[r.first].size(), table[r.second].size(), theta)) continue;
    const std::size_t count_a = eq.nodes[a].member_count;
    const std::size_t count_b = eq.nodes[b].member_count;
    // Equal-count pairs carry no direction.
    if (count_a == count_b) continue;
    edges.push_back(count_a > count_b ? Edge{a, b} : Edge{b, a});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Edge> transitive_reduction(std::size_t node_count, std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.empty()) return edges;

  // Work only on nodes that touch an edge.
  std::vector<std::size_t> local(node_count, SIZE_MAX);
  std::vector<std::size_t> global;
  for (const auto& e : edges) {
    for (std::size_t v : {e.parent, e.child}) {
      if (v >= node_count) throw IntegrityError("edge references unknown node");
      if (local[v] == SIZE_MAX) {
        local[v] = global.size();
        global.push_back(v);
      }
    }
  }
  const std::size_t n = global.size();
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : edges) {
    children[local[e.parent]].push_back(local[e.child]);
    ++indegree[local[e.child]];
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) order.push_back(v);
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t c : children[order[k]]) {
      if (--indegree[c] == 0) order.push_back(c);
    }
  }
  if (order.size() != n) throw IntegrityError("containment graph has a cycle");

  // Strict descendants of each node, filled in reverse topological order.
  std::vector<Bits> below(n, Bits(n));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (std::size_t c : children[*it]) {
      below[*it].set(c);
      below[*it] |= below[c];
    }
  }

  std::vector<Edge> kept;
  for (std::size_t u = 0; u < n; ++u) {
    Bits via_other(n);
    for (std::size_t c : children[u]) via_other |= below[c];
    for (std::size_t c : children[u]) {
      if (!via_other.test(c)) kept.push_back({global[u], global[c]});
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

HierarchyDag build_hierarchy(const GroupTable& table, const SimilarityMatrix& matrix,
                             double theta) {
  check_inputs(table, matrix, theta);
  HierarchyDag dag;
  dag.theta = theta;
  if (table.empty()) return dag;

  Equivalence eq = find_equivalences(table, matrix, theta);
  auto edges = containment_edges(table, matrix, eq, theta);
  dag.nodes = std::move(eq.nodes);
  dag.edges = transitive_reduction(dag.nodes.size(), std::move(edges));

  std::vector<bool> has_parent(dag.nodes.size(), false);
  for (const auto& e : dag.edges) has_parent[e.child] = true;
  for (std::size_t v = 0; v < dag.nodes.size(); ++v) {
    if (!has_parent[v]) dag.roots.push_back(v);
  }
  return dag;
}

ForestView forest_view(const HierarchyDag& dag) {
  const std::size_t n = dag.nodes.size();
  ForestView view;
  view.parent.assign(n, std::nullopt);
  view.children.assign(n, {});

  auto more_specific = [&](std::size_t a, std::size_t b) {
    const auto& na = dag.nodes[a];
    const auto& nb = dag.nodes[b];
    return na.member_count != nb.member_count ? na.member_count < nb.member_count
                                              : na.name < nb.name;
  };
  for (const auto& e : dag.edges) {
    auto& p = view.parent[e.child];
    if (!p || more_specific(e.parent, *p)) p = e.parent;
  }
  // Node indices follow name order, so ascending index is name order.
  for (std::size_t v = 0; v < n; ++v) {
    if (view.parent[v]) {
      view.children[*view.parent[v]].push_back(v);
    } else {
      view.top.push_back(v);
    }
  }
  return view;
}

DagStats dag_stats(const HierarchyDag& dag) {
  DagStats stats;
  stats.node_count = dag.nodes.size();
  stats.edge_count = dag.edges.size();
  stats.root_count = dag.roots.size();
  for (const auto& node : dag.nodes) {
    stats.alias_count += node.aliases.size();
    if (node.aliases.size() > 1) ++stats.merged_nodes;
    stats.max_aliases = std::max(stats.max_aliases, node.aliases.size());
  }

  const ForestView view = forest_view(dag);
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, depth)
  for (std::size_t v : view.top) stack.emplace_back(v, 1);
  while (!stack.empty()) {
    auto [v, depth] = stack.back();
    stack.pop_back();
    stats.max_depth = std::max(stats.max_depth, depth);
    for (std::size_t c : view.children[v]) stack.emplace_back(c, depth + 1);
  }
  return stats;
}

}  // namespace kghier
