#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kghier/ingest.hpp"

namespace kghier {

// Which triple position a group collects.
enum class GroupDirection : std::uint8_t {
  kSubjects = 0,  // (s, p, o) -> s joins group (p, o)
  kObjects = 1,   // (s, p, o) -> o joins group (s, p); only with inverse grouping
};

// Identity of a group: the predicate plus the anchoring entity (the object for
// subject groups, the subject for inverse groups). Display names are not part
// of identity.
struct GroupKey {
  GroupDirection direction = GroupDirection::kSubjects;
  PredicateId predicate{};
  EntityId anchor{};

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct GroupKeyHash {
  std::size_t operator()(const GroupKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.direction);
    h = (h << 32 | raw(k.predicate)) * 0x9E3779B97F4A7C15ULL;
    h ^= raw(k.anchor) + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct Group {
  // Absent for tables reloaded from a group dump, where only names survive.
  std::optional<GroupKey> key;
  std::string name;
  std::vector<EntityId> members;  // strictly ascending

  std::size_t size() const { return members.size(); }
};

// Named entity groups, ordered by key (or by name for reloaded tables).
// Names are unique within a table; the reserved name "ALL" is never used.
class GroupTable {
 public:
  GroupTable() : entities_(std::make_shared<Interner>()) {}
  GroupTable(std::vector<Group> groups, std::shared_ptr<const Interner> entities, std::size_t alpha)
      : groups_(std::move(groups)), entities_(std::move(entities)), alpha_(alpha) {}

  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }
  const Group& operator[](std::size_t i) const { return groups_[i]; }
  std::span<const Group> groups() const { return groups_; }
  std::size_t alpha() const { return alpha_; }

  const std::string& entity_name(EntityId id) const { return entities_->lookup(raw(id)); }
  const Interner& entities() const { return *entities_; }

  // Index of the group with this display name, if any.
  std::optional<std::size_t> find(const std::string& name) const;

  // Member labels in lexicographic order.
  std::vector<std::string> member_names(std::size_t index) const;

 private:
  std::vector<Group> groups_;
  std::shared_ptr<const Interner> entities_;
  std::size_t alpha_ = 1;
};

// Label reserved for the synthetic root of exported trees.
inline constexpr const char* kReservedRootName = "ALL";

struct GroupingOptions {
  std::size_t alpha = 10;
  std::size_t jobs = 1;
  bool inverse = false;
};

// Turns every triple (s, p, o) into "s belongs to group p_o", building one
// partial table per contiguous split of the triples (in parallel), merging
// the partial tables by set union, and dropping groups with fewer than alpha
// members. The result does not depend on `jobs`.
GroupTable generate_groups(const TripleSet& triples, const GroupingOptions& options);

// "predicate_object" for subject groups, "subject_predicate" for inverse
// groups.
std::string group_display_name(const TripleSet& triples, const GroupKey& key);

struct HistogramBucket {
  std::size_t lower = 0;  // inclusive
  std::size_t upper = 0;  // exclusive
  std::size_t count = 0;

  friend bool operator==(const HistogramBucket&, const HistogramBucket&) = default;
};

struct GroupStats {
  std::size_t group_count = 0;
  std::size_t membership_count = 0;  // sum of member-set sizes
  std::size_t distinct_members = 0;
  // Power-of-two size buckets [2^k, 2^(k+1)); only non-empty buckets appear.
  std::vector<HistogramBucket> histogram;
  // (name, size), largest first, ties by name.
  std::vector<std::pair<std::string, std::size_t>> largest;
};

GroupStats group_stats(const GroupTable& table, std::size_t top = 10);

// Group dump: JSON object mapping display name -> sorted array of entity
// labels. On reload a group named "ALL" becomes "ALL#2".
std::string groups_to_json(const GroupTable& table);
GroupTable groups_from_json(const std::string& text, std::size_t alpha);

void write_groups(const GroupTable& table, const std::filesystem::path& path);
GroupTable read_groups(const std::filesystem::path& path, std::size_t alpha);

}  // namespace kghier
