#include "kghier/export.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kghier/error.hpp"

namespace kghier {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

TreeNode build_tree(const HierarchyDag& dag, const ForestView& view, std::size_t v) {
  TreeNode node{dag.nodes[v].name, {}};
  node.children.reserve(view.children[v].size());
  for (std::size_t c : view.children[v]) node.children.push_back(build_tree(dag, view, c));
  return node;
}

ordered_json tree_to_json(const TreeNode& node) {
  ordered_json out;
  out["name"] = node.name;
  out["children"] = ordered_json::array();
  for (const auto& c : node.children) out["children"].push_back(tree_to_json(c));
  return out;
}

TreeNode tree_from_json(const json& j) {
  TreeNode node{j.at("name").get<std::string>(), {}};
  for (const auto& c : j.at("children")) node.children.push_back(tree_from_json(c));
  return node;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

struct DotNode {
  std::string name;
  std::size_t count;
};

std::string render_dot(std::vector<DotNode> nodes, std::vector<DocumentEdge> edges) {
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return a.parent != b.parent ? a.parent < b.parent : a.child < b.child;
  });
  std::string out = "digraph hierarchy {\n  rankdir=LR;\n";
  for (const auto& n : nodes) {
    out += "  " + dot_quote(n.name) + " [label=" +
           dot_quote(n.name + " (" + std::to_string(n.count) + ")") + "];\n";
  }
  for (const auto& e : edges) {
    out += "  " + dot_quote(e.parent) + " -> " + dot_quote(e.child) + ";\n";
  }
  out += "}\n";
  return out;
}

// --- validation ---------------------------------------------------------

bool is_count(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

class Validator {
 public:
  std::vector<std::string> run(const json& doc) {
    if (!doc.is_object()) {
      problem("(root)", "must be an object");
      return problems_;
    }
    check_metadata(doc);
    check_nodes(doc);
    check_tree(doc);
    check_edges(doc);
    return problems_;
  }

 private:
  void problem(const std::string& path, const std::string& what) {
    problems_.push_back(path + ": " + what);
  }

  template <typename Is>
  const json* require(const json& obj, const std::string& path, const char* key, Is is,
                      const char* type) {
    auto it = obj.find(key);
    const std::string where = path.empty() ? key : path + "." + key;
    if (it == obj.end()) {
      problem(where, "missing");
      return nullptr;
    }
    if (!std::invoke(is, *it)) {
      problem(where, std::string("must be ") + type);
      return nullptr;
    }
    return &*it;
  }

  void check_metadata(const json& doc) {
    const json* meta = require(doc, "", "metadata", &json::is_object, "an object");
    if (meta == nullptr) return;
    require(*meta, "metadata", "dataset", &json::is_string, "a string");
    require(*meta, "metadata", "tool_version", &json::is_string, "a string");
    for (const char* key : {"min_group_size", "group_count", "node_count", "edge_count", "root_count"}) {
      require(*meta, "metadata", key, is_count, "a non-negative integer");
    }
    if (const json* theta = require(*meta, "metadata", "theta", &json::is_number, "a number")) {
      const double t = theta->get<double>();
      if (!(t > 0.0 && t <= 1.0)) problem("metadata.theta", "must be in (0, 1]");
    }
    auto sample = meta->find("member_sample");
    if (sample == meta->end()) {
      problem("metadata.member_sample", "missing");
    } else if (!sample->is_null() && !is_count(*sample)) {
      problem("metadata.member_sample", "must be a non-negative integer or null");
    }
  }

  void check_nodes(const json& doc) {
    const json* nodes = require(doc, "", "nodes", &json::is_array, "an array");
    if (nodes == nullptr) return;
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const json& node = (*nodes)[i];
      const std::string path = "nodes[" + std::to_string(i) + "]";
      if (!node.is_object()) {
        problem(path, "must be an object");
        continue;
      }
      const json* name = require(node, path, "name", &json::is_string, "a string");
      require(node, path, "member_count", is_count, "a non-negative integer");
      for (const char* key : {"aliases", "members"}) {
        if (const json* arr = require(node, path, key, &json::is_array, "an array")) {
          for (std::size_t k = 0; k < arr->size(); ++k) {
            if (!(*arr)[k].is_string()) {
              problem(path + "." + key + "[" + std::to_string(k) + "]", "must be a string");
            }
          }
        }
      }
      if (name == nullptr) continue;
      const auto& n = name->get_ref<const std::string&>();
      if (n.empty()) problem(path + ".name", "must not be empty");
      if (n == kReservedRootName) problem(path + ".name", "uses the reserved root name");
      if (!names_.insert(n).second) problem(path + ".name", "duplicate node '" + n + "'");
    }
    if (const auto meta = doc.find("metadata"); meta != doc.end() && meta->is_object()) {
      if (auto c = meta->find("node_count");
          c != meta->end() && is_count(*c) && c->get<std::size_t>() != nodes->size()) {
        problem("metadata.node_count", "does not match the number of nodes");
      }
    }
  }

  void check_tree(const json& doc) {
    const json* tree = require(doc, "", "tree", &json::is_object, "an object");
    if (tree == nullptr) return;
    if (const json* name = require(*tree, "tree", "name", &json::is_string, "a string")) {
      if (name->get_ref<const std::string&>() != kReservedRootName) {
        problem("tree.name", std::string("root must be named '") + kReservedRootName + "'");
      }
    }
    std::set<std::string> seen;
    check_children(*tree, "tree", seen);
    for (const auto& n : names_) {
      if (!seen.contains(n)) problem("tree", "node '" + n + "' does not appear in the tree");
    }
  }

  void check_children(const json& node, const std::string& path, std::set<std::string>& seen) {
    const json* children = require(node, path, "children", &json::is_array, "an array");
    if (children == nullptr) return;
    for (std::size_t i = 0; i < children->size(); ++i) {
      const json& child = (*children)[i];
      const std::string cpath = path + ".children[" + std::to_string(i) + "]";
      if (!child.is_object()) {
        problem(cpath, "must be an object");
        continue;
      }
      if (const json* name = require(child, cpath, "name", &json::is_string, "a string")) {
        const auto& n = name->get_ref<const std::string&>();
        if (!names_.contains(n)) {
          problem(cpath + ".name", "dangling reference '" + n + "'");
        } else if (!seen.insert(n).second) {
          problem(cpath + ".name", "node '" + n + "' appears twice in the tree");
        }
      }
      check_children(child, cpath, seen);
    }
  }

  void check_edges(const json& doc) {
    const json* edges = require(doc, "", "dag_edges", &json::is_array, "an array");
    if (edges == nullptr) return;
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const json& e = (*edges)[i];
      const std::string path = "dag_edges[" + std::to_string(i) + "]";
      if (!e.is_object()) {
        problem(path, "must be an object");
        continue;
      }
      for (const char* key : {"parent", "child"}) {
        if (const json* v = require(e, path, key, &json::is_string, "a string")) {
          const auto& n = v->get_ref<const std::string&>();
          if (!names_.contains(n)) problem(path + "." + key, "dangling reference '" + n + "'");
        }
      }
    }
    if (const auto meta = doc.find("metadata"); meta != doc.end() && meta->is_object()) {
      if (auto c = meta->find("edge_count");
          c != meta->end() && is_count(*c) && c->get<std::size_t>() != edges->size()) {
        problem("metadata.edge_count", "does not match the number of dag edges");
      }
    }
  }

  std::vector<std::string> problems_;
  std::unordered_set<std::string> names_;
};

}  // namespace

HierarchyDocument make_document(const HierarchyDag& dag, const GroupTable& table,
                                const ExportOptions& options) {
  HierarchyDocument doc;
  auto& meta = doc.metadata;
  meta.dataset = options.dataset;
  meta.min_group_size = table.alpha();
  meta.theta = dag.theta;
  meta.group_count = table.size();
  meta.node_count = dag.nodes.size();
  meta.edge_count = dag.edges.size();
  meta.root_count = dag.roots.size();
  meta.member_sample = options.member_sample;

  doc.nodes.reserve(dag.nodes.size());
  for (const auto& node : dag.nodes) {
    DocumentNode out;
    out.name = node.name;
    out.member_count = node.member_count;
    for (std::size_t g : node.aliases) out.aliases.push_back(table[g].name);
    out.members = table.member_names(node.representative);
    if (options.member_sample && out.members.size() > *options.member_sample) {
      out.members.resize(*options.member_sample);
    }
    doc.nodes.push_back(std::move(out));
  }

  const ForestView view = forest_view(dag);
  doc.tree.name = kReservedRootName;
  for (std::size_t v : view.top) doc.tree.children.push_back(build_tree(dag, view, v));

  for (const auto& e : dag.edges) {
    doc.dag_edges.push_back({dag.nodes[e.parent].name, dag.nodes[e.child].name});
  }
  return doc;
}

ordered_json document_to_json(const HierarchyDocument& doc) {
  ordered_json out;
  const auto& m = doc.metadata;
  ordered_json meta;
  meta["dataset"] = m.dataset;
  meta["tool_version"] = m.tool_version;
  meta["min_group_size"] = m.min_group_size;
  meta["theta"] = m.theta;
  meta["group_count"] = m.group_count;
  meta["node_count"] = m.node_count;
  meta["edge_count"] = m.edge_count;
  meta["root_count"] = m.root_count;
  meta["member_sample"] = m.member_sample ? ordered_json(*m.member_sample) : ordered_json(nullptr);
  out["metadata"] = std::move(meta);

  out["nodes"] = ordered_json::array();
  for (const auto& n : doc.nodes) {
    ordered_json node;
    node["name"] = n.name;
    node["member_count"] = n.member_count;
    node["aliases"] = n.aliases;
    node["members"] = n.members;
    out["nodes"].push_back(std::move(node));
  }
  out["tree"] = tree_to_json(doc.tree);
  out["dag_edges"] = ordered_json::array();
  for (const auto& e : doc.dag_edges) {
    ordered_json edge;
    edge["parent"] = e.parent;
    edge["child"] = e.child;
    out["dag_edges"].push_back(std::move(edge));
  }
  return out;
}

std::string serialize_document(const HierarchyDocument& doc) {
  return document_to_json(doc).dump(2) + "\n";
}

std::vector<std::string> validate_document(const json& doc) { return Validator{}.run(doc); }

HierarchyDocument document_from_json(const json& j) {
  if (auto problems = validate_document(j); !problems.empty()) {
    throw ValidationError(std::move(problems));
  }
  HierarchyDocument doc;
  const auto& meta = j.at("metadata");
  auto& m = doc.metadata;
  m.dataset = meta.at("dataset").get<std::string>();
  m.tool_version = meta.at("tool_version").get<std::string>();
  m.min_group_size = meta.at("min_group_size").get<std::size_t>();
  m.theta = meta.at("theta").get<double>();
  m.group_count = meta.at("group_count").get<std::size_t>();
  m.node_count = meta.at("node_count").get<std::size_t>();
  m.edge_count = meta.at("edge_count").get<std::size_t>();
  m.root_count = meta.at("root_count").get<std::size_t>();
  if (const auto& s = meta.at("member_sample"); !s.is_null()) m.member_sample = s.get<std::size_t>();

  for (const auto& n : j.at("nodes")) {
    doc.nodes.push_back({n.at("name").get<std::string>(),
                         n.at("aliases").get<std::vector<std::string>>(),
                         n.at("member_count").get<std::size_t>(),
                         n.at("members").get<std::vector<std::string>>()});
  }
  doc.tree = tree_from_json(j.at("tree"));
  for (const auto& e : j.at("dag_edges")) {
    doc.dag_edges.push_back({e.at("parent").get<std::string>(), e.at("child").get<std::string>()});
  }
  return doc;
}

HierarchyDocument parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("(root): not valid JSON: ") + e.what()});
  }
  return document_from_json(j);
}

HierarchyDocument read_document(const fs::path& path) { return parse_document(read_text_file(path)); }

void export_json(const HierarchyDag& dag, const GroupTable& table, const ExportOptions& options,
                 const fs::path& path) {
  write_text_file(path, serialize_document(make_document(dag, table, options)));
}

std::string dot_text(const HierarchyDag& dag) {
  std::vector<DotNode> nodes;
  for (const auto& n : dag.nodes) nodes.push_back({n.name, n.member_count});
  std::vector<DocumentEdge> edges;
  for (const auto& e : dag.edges) edges.push_back({dag.nodes[e.parent].name, dag.nodes[e.child].name});
  return render_dot(std::move(nodes), std::move(edges));
}

std::string dot_text(const HierarchyDocument& doc) {
  std::vector<DotNode> nodes;
  for (const auto& n : doc.nodes) nodes.push_back({n.name, n.member_count});
  return render_dot(std::move(nodes), doc.dag_edges);
}

void export_dot(const HierarchyDag& dag, const fs::path& path) { write_text_file(path, dot_text(dag)); }

void emit_viewer(const fs::path& document_path, const fs::path& output_dir,
                 const fs::path& bundle_dir) {
  if (!fs::is_regular_file(bundle_dir / kViewerEntryPage)) {
    throw Error("viewer bundle not found: " + (bundle_dir / kViewerEntryPage).string() +
                " is missing; build the viewer component first or pass its dist directory");
  }
  const HierarchyDocument doc = read_document(document_path);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(bundle_dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), bundle_dir));
  }
  std::sort(files.begin(), files.end());

  fs::create_directories(output_dir);
  for (const auto& rel : files) {
    if (rel == kViewerDataFile) continue;
    const fs::path dst = output_dir / rel;
    fs::create_directories(dst.parent_path());
    fs::copy_file(bundle_dir / rel, dst, fs::copy_options::overwrite_existing);
  }
  write_text_file(output_dir / kViewerDataFile, serialize_document(doc));
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write error on " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace kghier
