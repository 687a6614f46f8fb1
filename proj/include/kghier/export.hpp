#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kghier/grouping.hpp"
#include "kghier/hierarchy.hpp"

namespace kghier {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::size_t kDefaultMemberSample = 25;

struct DocumentMetadata {
  std::string dataset;
  std::string tool_version = kToolVersion;
  std::size_t min_group_size = 0;
  double theta = kDefaultTheta;
  std::size_t group_count = 0;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t root_count = 0;
  // Members listed per node; nullopt means full membership.
  std::optional<std::size_t> member_sample;

  friend bool operator==(const DocumentMetadata&, const DocumentMetadata&) = default;
};

struct DocumentNode {
  std::string name;
  std::vector<std::string> aliases;  // includes name
  std::size_t member_count = 0;
  std::vector<std::string> members;  // lexicographic, possibly truncated

  friend bool operator==(const DocumentNode&, const DocumentNode&) = default;
};

struct TreeNode {
  std::string name;
  std::vector<TreeNode> children;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DocumentEdge {
  std::string parent;
  std::string child;

  friend bool operator==(const DocumentEdge&, const DocumentEdge&) = default;
};

// Interchange format between the pipeline and the viewer.
struct HierarchyDocument {
  DocumentMetadata metadata;
  std::vector<DocumentNode> nodes;  // sorted by name
  TreeNode tree;                    // synthetic root "ALL"
  std::vector<DocumentEdge> dag_edges;

  friend bool operator==(const HierarchyDocument&, const HierarchyDocument&) = default;
};

struct ExportOptions {
  std::string dataset = "kg";
  // nullopt embeds every member.
  std::optional<std::size_t> member_sample = kDefaultMemberSample;
};

HierarchyDocument make_document(const HierarchyDag& dag, const GroupTable& table,
                                const ExportOptions& options);

nlohmann::ordered_json document_to_json(const HierarchyDocument& doc);
std::string serialize_document(const HierarchyDocument& doc);

// Structural check of a parsed document: required keys and types, unique
// node names, and every tree/edge name resolving to a node. Returns one
// message per problem, each naming the offending key path.
std::vector<std::string> validate_document(const nlohmann::json& doc);

// Validates, then converts. Throws ValidationError.
HierarchyDocument document_from_json(const nlohmann::json& doc);
HierarchyDocument parse_document(const std::string& text);
HierarchyDocument read_document(const std::filesystem::path& path);

void export_json(const HierarchyDag& dag, const GroupTable& table, const ExportOptions& options,
                 const std::filesystem::path& path);

// Graphviz digraph: one `"name" [label="name (count)"];` line per node and one
// `"parent" -> "child";` line per dag edge, both in sorted order.
std::string dot_text(const HierarchyDag& dag);
std::string dot_text(const HierarchyDocument& doc);
void export_dot(const HierarchyDag& dag, const std::filesystem::path& path);

inline constexpr const char* kViewerEntryPage = "index.html";
inline constexpr const char* kViewerDataFile = "hierarchy.json";

// Copies the static viewer bundle into output_dir and writes the validated
// document beside it as hierarchy.json. Throws Error when the bundle lacks
// index.html and ValidationError for an invalid document.
void emit_viewer(const std::filesystem::path& document_path,
                 const std::filesystem::path& output_dir,
                 const std::filesystem::path& bundle_dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace kghier
