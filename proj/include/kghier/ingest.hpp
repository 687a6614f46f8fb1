#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kghier {

enum class EntityId : std::uint32_t {};
enum class PredicateId : std::uint32_t {};

constexpr std::uint32_t raw(EntityId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t raw(PredicateId id) { return static_cast<std::uint32_t>(id); }

enum class TripleFormat { kTsv, kNTriples };

// Parses "tsv" / "ntriples"; throws ConfigError otherwise.
TripleFormat parse_format(std::string_view name);
std::string_view format_name(TripleFormat format);

// A triple exactly as it appears in the source file.
struct RawTriple {
  std::string subject;
  std::string predicate;
  std::string object;

  friend bool operator==(const RawTriple&, const RawTriple&) = default;
  friend auto operator<=>(const RawTriple&, const RawTriple&) = default;
};

struct Triple {
  EntityId subject;
  PredicateId predicate;
  EntityId object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Dense string <-> id mapping; ids are assigned 0, 1, 2, ... in insertion
// order.
class Interner {
 public:
  std::uint32_t intern(std::string_view label);
  std::optional<std::uint32_t> find(std::string_view label) const;
  const std::string& lookup(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Entities (subjects and objects) and predicates live in separate namespaces.
class SymbolTable {
 public:
  EntityId intern_entity(std::string_view label) { return EntityId{entities_.intern(label)}; }
  PredicateId intern_predicate(std::string_view label) {
    return PredicateId{predicates_.intern(label)};
  }

  const std::string& entity(EntityId id) const { return entities_.lookup(raw(id)); }
  const std::string& predicate(PredicateId id) const { return predicates_.lookup(raw(id)); }

  std::optional<EntityId> find_entity(std::string_view label) const;
  std::optional<PredicateId> find_predicate(std::string_view label) const;

  const Interner& entities() const { return entities_; }
  const Interner& predicates() const { return predicates_; }

 private:
  Interner entities_;
  Interner predicates_;
};

// Deduplicated triples in first-appearance order plus the symbols they use.
struct TripleSet {
  std::vector<Triple> triples;
  SymbolTable symbols;
  std::vector<std::filesystem::path> sources;

  std::size_t size() const { return triples.size(); }
  RawTriple resolve(const Triple& t) const;
};

// Calls `sink` once per data line. Blank lines and lines starting with '#'
// are skipped. Throws IoError if the file cannot be read and ParseError on
// a malformed line.
void parse_triples(const std::filesystem::path& path, TripleFormat format,
                   const std::function<void(RawTriple&&)>& sink);

std::vector<RawTriple> read_triples(const std::filesystem::path& path, TripleFormat format);

// Parses a single line. Returns nullopt for blank and comment lines.
std::optional<RawTriple> parse_line(std::string_view line, TripleFormat format,
                                    const std::string& file, std::size_t line_number);

// Union of all files with set semantics. Files are parsed concurrently when
// jobs > 1; interning always follows the order of `paths`. Throws Error
// ("no triples") when the union is empty.
TripleSet join_splits(const std::vector<std::filesystem::path>& paths, TripleFormat format,
                      std::size_t jobs = 1);

// Builds a TripleSet from in-memory triples with the same dedup/interning
// rules as join_splits (but no emptiness check).
TripleSet make_triple_set(const std::vector<RawTriple>& raw);

// Writes one "s\tp\to" line per triple in set order.
void write_tsv(const TripleSet& set, const std::filesystem::path& path);

}  // namespace kghier
