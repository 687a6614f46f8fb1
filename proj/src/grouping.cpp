#include "kghier/grouping.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "kghier/error.hpp"
#include "kghier/parallel.hpp"

namespace kghier {

namespace {

using PartialTable = std::unordered_map<GroupKey, std::vector<EntityId>, GroupKeyHash>;

PartialTable group_chunk(std::span<const Triple> triples, bool inverse) {
  PartialTable table;
  for (const auto& t : triples) {
    table[GroupKey{GroupDirection::kSubjects, t.predicate, t.object}].push_back(t.subject);
    if (inverse) {
      table[GroupKey{GroupDirection::kObjects, t.predicate, t.subject}].push_back(t.object);
    }
  }
  return table;
}

// Gives every group a unique display name. Collisions are resolved in table
// order by appending "#2", "#3", ...; the reserved root label counts as taken.
void assign_unique_names(std::vector<Group>& groups, std::vector<std::string> base_names) {
  std::unordered_set<std::string> taken{kReservedRootName};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::string name = base_names[i];
    for (std::size_t n = 2; taken.contains(name); ++n) {
      name = base_names[i] + "#" + std::to_string(n);
    }
    taken.insert(name);
    groups[i].name = std::move(name);
  }
}

}  // namespace

std::string group_display_name(const TripleSet& triples, const GroupKey& key) {
  const auto& pred = triples.symbols.predicate(key.predicate);
  const auto& anchor = triples.symbols.entity(key.anchor);
  if (key.direction == GroupDirection::kSubjects) return pred + "_" + anchor;
  return anchor + "_" + pred;
}

GroupTable generate_groups(const TripleSet& triples, const GroupingOptions& options) {
  if (options.alpha < 1) throw ConfigError("minimum group size must be >= 1");
  if (options.jobs < 1) throw ConfigError("jobs must be >= 1");

  const auto chunks = split_range(triples.triples.size(), options.jobs);
  std::vector<PartialTable> partials(chunks.size());
  const std::span<const Triple> all(triples.triples);
  run_chunks(chunks, [&](std::size_t i, Chunk c) {
    partials[i] = group_chunk(all.subspan(c.begin, c.end - c.begin), options.inverse);
  });

  // Per-key set union. Order of partials does not matter since each member
  // list is sorted and deduplicated afterwards.
  PartialTable merged = std::move(partials.front());
  for (std::size_t i = 1; i < partials.size(); ++i) {
    for (auto& [key, members] : partials[i]) {
      auto& dst = merged[key];
      dst.insert(dst.end(), members.begin(), members.end());
    }
    PartialTable{}.swap(partials[i]);
  }

  std::vector<Group> groups;
  groups.reserve(merged.size());
  for (auto& [key, members] : merged) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() < options.alpha) continue;
    groups.push_back(Group{key, {}, std::move(members)});
  }
  std::sort(groups.begin(), groups.end(),
            [](const Group& a, const Group& b) { return *a.key < *b.key; });

  std::vector<std::string> base_names;
  base_names.reserve(groups.size());
  for (const auto& g : groups) base_names.push_back(group_display_name(triples, *g.key));
  assign_unique_names(groups, std::move(base_names));

  auto entities = std::make_shared<Interner>(triples.symbols.entities());
  return GroupTable(std::move(groups), std::move(entities), options.alpha);
}

std::optional<std::size_t> GroupTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> GroupTable::member_names(std::size_t index) const {
  std::vector<std::string> names;
  names.reserve(groups_[index].members.size());
  for (EntityId id : groups_[index].members) names.push_back(entity_name(id));
  std::sort(names.begin(), names.end());
  return names;
}

GroupStats group_stats(const GroupTable& table, std::size_t top) {
  GroupStats stats;
  stats.group_count = table.size();
  std::unordered_set<std::uint32_t> distinct;
  std::map<std::size_t, std::size_t> buckets;  // log2(size) -> count
  for (const auto& g : table.groups()) {
    stats.membership_count += g.size();
    for (EntityId e : g.members) distinct.insert(raw(e));
    if (g.size() > 0) ++buckets[std::bit_width(g.size()) - 1];
  }
  stats.distinct_members = distinct.size();
  for (auto [exp, count] : buckets) {
    stats.histogram.push_back({std::size_t{1} << exp, std::size_t{1} << (exp + 1), count});
  }

  std::vector<std::pair<std::string, std::size_t>> all;
  all.reserve(table.size());
  for (const auto& g : table.groups()) all.emplace_back(g.name, g.size());
  const std::size_t keep = std::min(top, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  all.resize(keep);
  stats.largest = std::move(all);
  return stats;
}

std::string groups_to_json(const GroupTable& table) {
  // std::map keeps keys in byte order, which nlohmann::json also uses.
  nlohmann::json doc = nlohmann::json::object();
  for (std::size_t i = 0; i < table.size(); ++i) doc[table[i].name] = table.member_names(i);
  return doc.dump(1) + "\n";
}

GroupTable groups_from_json(const std::string& text, std::size_t alpha) {
  if (alpha < 1) throw ConfigError("minimum group size must be >= 1");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IntegrityError(std::string("group dump is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IntegrityError("group dump must be a JSON object");

  auto entities = std::make_shared<Interner>();
  std::vector<Group> groups;
  std::vector<std::string> base_names;
  for (const auto& [name, members] : doc.items()) {
    if (!members.is_array() || members.empty()) {
      throw IntegrityError("group '" + name + "' must be a non-empty array of entity labels");
    }
    Group g;
    g.name = name;
    for (const auto& m : members) {
      if (!m.is_string()) throw IntegrityError("group '" + name + "' has a non-string member");
      g.members.push_back(EntityId{entities->intern(m.get<std::string>())});
    }
    std::sort(g.members.begin(), g.members.end());
    if (std::adjacent_find(g.members.begin(), g.members.end()) != g.members.end()) {
      throw IntegrityError("group '" + name + "' lists a member twice");
    }
    if (g.members.size() >= alpha) {
      groups.push_back(std::move(g));
      base_names.push_back(name);
    }
  }
  assign_unique_names(groups, std::move(base_names));
  return GroupTable(std::move(groups), std::move(entities), alpha);
}

void write_groups(const GroupTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << groups_to_json(table);
  if (!out) throw IoError("write error on " + path.string());
}

GroupTable read_groups(const std::filesystem::path& path, std::size_t alpha) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return groups_from_json(buf.str(), alpha);
}

}  // namespace kghier
