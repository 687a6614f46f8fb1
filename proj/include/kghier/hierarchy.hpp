#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kghier/grouping.hpp"
#include "kghier/similarity.hpp"

namespace kghier {

// HPI containment threshold used when none is given.
inline constexpr double kDefaultTheta = 0.9;

// One equivalence class of near-equal groups.
struct HierarchyNode {
  std::size_t representative = 0;    // table index; alias with smallest name
  std::vector<std::size_t> aliases;  // table indices sorted by name, includes representative
  std::string name;                  // representative's display name
  std::size_t member_count = 0;      // representative's size

  friend bool operator==(const HierarchyNode&, const HierarchyNode&) = default;
};

// parent ⊇ child (up to theta). Indices into HierarchyDag::nodes.
struct Edge {
  std::size_t parent = 0;
  std::size_t child = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Nodes sorted by name, edges sorted by (parent, child), roots ascending.
// Every edge goes from a strictly larger member_count to a strictly smaller
// one, and no edge is implied by a longer path.
struct HierarchyDag {
  std::vector<HierarchyNode> nodes;
  std::vector<Edge> edges;
  std::vector<std::size_t> roots;
  double theta = kDefaultTheta;

  bool empty() const { return nodes.empty(); }

  friend bool operator==(const HierarchyDag&, const HierarchyDag&) = default;
};

// Containment predicate on exact counts. At theta == 1 this is the integer
// test intersection == min(size1, size2).
bool hpi_at_least(const SimilarityRecord& record, std::size_t size1, std::size_t size2,
                  double theta);

// Equivalence predicate: jaccard >= theta, or equal sizes with hpi >= theta.
bool near_equal(const SimilarityRecord& record, std::size_t size1, std::size_t size2,
                double theta);

// Assignment of groups to equivalence classes.
struct Equivalence {
  std::vector<HierarchyNode> nodes;       // sorted by name
  std::vector<std::size_t> node_of_group; // table index -> node index
};

// Throws ConfigError for theta outside (0, 1] and IntegrityError when the
// matrix does not belong to the table.
void check_inputs(const GroupTable& table, const SimilarityMatrix& matrix, double theta);

// Union-find over all near-equal pairs.
Equivalence find_equivalences(const GroupTable& table, const SimilarityMatrix& matrix,
                              double theta);

// All containment edges between distinct nodes before transitive reduction,
// sorted and deduplicated.
std::vector<Edge> containment_edges(const GroupTable& table, const SimilarityMatrix& matrix,
                                    const Equivalence& eq, double theta);

// Removes every edge (a, c) for which another path a -> ... -> c exists.
// Requires an acyclic graph.
std::vector<Edge> transitive_reduction(std::size_t node_count, std::vector<Edge> edges);

// Equivalence pass, containment pass, transitive reduction, roots.
HierarchyDag build_hierarchy(const GroupTable& table, const SimilarityMatrix& matrix,
                             double theta = kDefaultTheta);

// Tree projection: every node keeps its most specific parent (smallest
// member_count, then smallest name). Top-level nodes hang under a synthetic
// root labeled "ALL".
struct ForestView {
  std::vector<std::optional<std::size_t>> parent;  // per dag node
  std::vector<std::vector<std::size_t>> children;  // per dag node, sorted by name
  std::vector<std::size_t> top;                    // children of the synthetic root

  friend bool operator==(const ForestView&, const ForestView&) = default;
};

ForestView forest_view(const HierarchyDag& dag);

struct DagStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t root_count = 0;
  std::size_t max_depth = 0;      // nodes on the longest forest path, root excluded
  std::size_t alias_count = 0;    // groups across all nodes
  std::size_t merged_nodes = 0;   // nodes holding more than one group
  std::size_t max_aliases = 0;

  friend bool operator==(const DagStats&, const DagStats&) = default;
};

DagStats dag_stats(const HierarchyDag& dag);

}  // namespace kghier
