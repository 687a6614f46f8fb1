#include "kghier/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "kghier/error.hpp"
#include "kghier/parallel.hpp"

namespace kghier {

namespace {

std::size_t intersection_size(std::span<const EntityId> a, std::span<const EntityId> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

SimilarityRecord make_record(const GroupTable& table, std::uint32_t first, std::uint32_t second,
                             std::size_t intersection) {
  const auto s = similarity_from_counts(intersection, table[first].size(), table[second].size());
  return {first, second, s.intersection, s.jaccard, s.hpi};
}

void canonical_sort(std::vector<SimilarityRecord>& records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
}

void require_groups(const GroupTable& table, std::size_t jobs) {
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (table.size() > UINT32_MAX) throw PreconditionError("too many groups");
}

}  // namespace

PairSimilarity similarity_from_counts(std::size_t intersection, std::size_t size1,
                                      std::size_t size2) {
  if (size1 == 0 || size2 == 0) throw PreconditionError("similarity of an empty group");
  const std::size_t smaller = std::min(size1, size2);
  if (intersection > smaller) {
    throw PreconditionError("intersection larger than the smaller group");
  }
  const std::size_t uni = size1 + size2 - intersection;
  return {intersection, static_cast<double>(intersection) / static_cast<double>(uni),
          static_cast<double>(intersection) / static_cast<double>(smaller)};
}

PairSimilarity pair_similarity(std::span<const EntityId> members1,
                               std::span<const EntityId> members2) {
  if (members1.empty() || members2.empty()) {
    throw PreconditionError("pair_similarity requires non-empty sets");
  }
  return similarity_from_counts(intersection_size(members1, members2), members1.size(),
                                members2.size());
}

SimilarityEngine parse_engine(std::string_view name) {
  if (name == "indexed") return SimilarityEngine::kIndexed;
  if (name == "bruteforce") return SimilarityEngine::kBruteForce;
  throw ConfigError("unknown engine '" + std::string(name) + "' (expected indexed or bruteforce)");
}

SimilarityMatrix all_pairs_bruteforce(const GroupTable& table, std::size_t jobs) {
  require_groups(table, jobs);
  const std::size_t n = table.size();
  const std::size_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const auto chunks = split_range(pairs, jobs);
  std::vector<std::vector<SimilarityRecord>> partial(chunks.size());

  run_chunks(chunks, [&](std::size_t part, Chunk c) {
    if (c.begin == c.end) return;
    // Locate the (i, j) pair with linear index c.begin.
    std::size_t i = 0;
    std::size_t row_start = 0;
    while (row_start + (n - 1 - i) <= c.begin) {
      row_start += n - 1 - i;
      ++i;
    }
    std::size_t j = i + 1 + (c.begin - row_start);
    auto& out = partial[part];
    for (std::size_t k = c.begin; k < c.end; ++k) {
      const auto s = pair_similarity(table[i].members, table[j].members);
      if (s.intersection > 0) {
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                       s.intersection, s.jaccard, s.hpi});
      }
      if (++j == n) {
        ++i;
        j = i + 1;
      }
    }
  });

  SimilarityMatrix matrix;
  matrix.group_count = n;
  for (auto& p : partial) matrix.records.insert(matrix.records.end(), p.begin(), p.end());
  canonical_sort(matrix.records);
  return matrix;
}

SimilarityMatrix all_pairs_indexed(const GroupTable& table, std::size_t jobs) {
  require_groups(table, jobs);
  const std::size_t entity_count = table.entities().size();

  std::vector<std::vector<std::uint32_t>> postings(entity_count);
  for (std::size_t g = 0; g < table.size(); ++g) {
    for (EntityId e : table[g].members) postings[raw(e)].push_back(static_cast<std::uint32_t>(g));
  }

  using PairCount = std::pair<std::uint64_t, std::uint32_t>;
  const auto chunks = split_range(entity_count, jobs);
  std::vector<std::vector<PairCount>> partial(chunks.size());

  run_chunks(chunks, [&](std::size_t part, Chunk c) {
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    for (std::size_t e = c.begin; e < c.end; ++e) {
      const auto& groups = postings[e];
      for (std::size_t a = 0; a < groups.size(); ++a) {
        const std::uint64_t hi = static_cast<std::uint64_t>(groups[a]) << 32;
        for (std::size_t b = a + 1; b < groups.size(); ++b) ++counts[hi | groups[b]];
      }
    }
    partial[part].assign(counts.begin(), counts.end());
  });

  std::vector<PairCount> merged;
  for (auto& p : partial) {
    merged.insert(merged.end(), p.begin(), p.end());
    std::vector<PairCount>{}.swap(p);
  }
  std::sort(merged.begin(), merged.end());

  SimilarityMatrix matrix;
  matrix.group_count = table.size();
  for (std::size_t k = 0; k < merged.size();) {
    const std::uint64_t key = merged[k].first;
    std::size_t total = 0;
    for (; k < merged.size() && merged[k].first == key; ++k) total += merged[k].second;
    matrix.records.push_back(make_record(table, static_cast<std::uint32_t>(key >> 32),
                                         static_cast<std::uint32_t>(key & 0xFFFFFFFFULL), total));
  }
  return matrix;
}

SimilarityMatrix all_pairs(const GroupTable& table, SimilarityEngine engine, std::size_t jobs) {
  return engine == SimilarityEngine::kIndexed ? all_pairs_indexed(table, jobs)
                                              : all_pairs_bruteforce(table, jobs);
}

// --- CSV ---------------------------------------------------------------

namespace {

void append_csv_field(std::string& out, const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

// Splits one CSV record starting at `pos`; advances `pos` past the line end.
std::vector<std::string> next_csv_record(const std::string& text, std::size_t& pos,
                                         std::size_t line_number) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          fields.back() += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw IntegrityError("csv line " + std::to_string(line_number) + ": unterminated quote");
  return fields;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_number) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw IntegrityError("csv line " + std::to_string(line_number) + ": bad number '" + s + "'");
  }
  return value;
}

}  // namespace

std::string matrix_to_csv(const GroupTable& table, const SimilarityMatrix& matrix) {
  std::vector<const SimilarityRecord*> rows;
  rows.reserve(matrix.records.size());
  for (const auto& r : matrix.records) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [&](const auto* a, const auto* b) {
    const auto& a1 = table[a->first].name;
    const auto& b1 = table[b->first].name;
    if (a1 != b1) return a1 < b1;
    return table[a->second].name < table[b->second].name;
  });

  std::string out = "group1,group2,intersection,jaccard,hpi\n";
  for (const auto* r : rows) {
    append_csv_field(out, table[r->first].name);
    out += ',';
    append_csv_field(out, table[r->second].name);
    out += ',';
    out += std::to_string(r->intersection);
    out += ',';
    append_double(out, r->jaccard);
    out += ',';
    append_double(out, r->hpi);
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const GroupTable& table, const SimilarityMatrix& matrix,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << matrix_to_csv(table, matrix);
  if (!out) throw IoError("write error on " + path.string());
}

SimilarityMatrix matrix_from_csv(const GroupTable& table, const std::string& text) {
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < table.size(); ++i) {
    index.emplace(table[i].name, static_cast<std::uint32_t>(i));
  }
  auto lookup = [&](const std::string& name, std::size_t line) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw IntegrityError("csv line " + std::to_string(line) + ": unknown group '" + name + "'");
    }
    return it->second;
  };

  std::size_t pos = 0;
  std::size_t line = 1;
  const auto header = next_csv_record(text, pos, line);
  if (header != std::vector<std::string>{"group1", "group2", "intersection", "jaccard", "hpi"}) {
    throw IntegrityError("csv header must be group1,group2,intersection,jaccard,hpi");
  }

  SimilarityMatrix matrix;
  matrix.group_count = table.size();
  while (pos < text.size()) {
    ++line;
    const auto fields = next_csv_record(text, pos, line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 5) {
      throw IntegrityError("csv line " + std::to_string(line) + ": expected 5 fields");
    }
    std::uint32_t a = lookup(fields[0], line);
    std::uint32_t b = lookup(fields[1], line);
    if (a == b) throw IntegrityError("csv line " + std::to_string(line) + ": self pair");
    if (a > b) std::swap(a, b);
    const auto intersection = parse_number<std::size_t>(fields[2], line);
    const auto jaccard = parse_number<double>(fields[3], line);
    const auto hpi = parse_number<double>(fields[4], line);
    if (intersection == 0) {
      throw IntegrityError("csv line " + std::to_string(line) + ": zero-intersection record");
    }
    SimilarityRecord rec;
    try {
      rec = make_record(table, a, b, intersection);
    } catch (const PreconditionError& e) {
      throw IntegrityError("csv line " + std::to_string(line) + ": " + e.what());
    }
    if (std::abs(rec.jaccard - jaccard) > 1e-9 || std::abs(rec.hpi - hpi) > 1e-9) {
      throw IntegrityError("csv line " + std::to_string(line) +
                           ": ratios disagree with the group sizes");
    }
    matrix.records.push_back(rec);
  }
  canonical_sort(matrix.records);
  for (std::size_t k = 1; k < matrix.records.size(); ++k) {
    const auto& p = matrix.records[k - 1];
    const auto& q = matrix.records[k];
    if (p.first == q.first && p.second == q.second) {
      throw IntegrityError("csv lists the pair (" + table[p.first].name + ", " +
                           table[p.second].name + ") twice");
    }
  }
  return matrix;
}

SimilarityMatrix read_matrix_csv(const GroupTable& table, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return matrix_from_csv(table, buf.str());
}

}  // namespace kghier
