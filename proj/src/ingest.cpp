#include "kghier/ingest.hpp"

#include <fstream>
#include <future>
#include <unordered_set>

#include "kghier/error.hpp"

namespace kghier {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::optional<RawTriple> parse_tsv(std::string_view line, const std::string& file,
                                   std::size_t line_number) {
  std::string_view fields[3];
  std::size_t count = 0;
  std::size_t start = 0;
  while (count < 3) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields[count++] = line.substr(start);
      break;
    }
    fields[count++] = line.substr(start, tab - start);
    start = tab + 1;
  }
  if (count < 3) {
    throw ParseError(file, line_number,
                     "expected 3 tab-separated fields, found " + std::to_string(count));
  }
  // Anything after a third tab is ignored.
  if (const std::size_t tab = fields[2].find('\t'); tab != std::string_view::npos) {
    fields[2] = fields[2].substr(0, tab);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (fields[i].empty()) {
      throw ParseError(file, line_number, "empty field " + std::to_string(i + 1));
    }
  }
  return RawTriple{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
}

// Minimal N-Triples term scanner over one line.
class TermScanner {
 public:
  TermScanner(std::string_view line, const std::string& file, std::size_t line_number)
      : line_(line), file_(file), line_number_(line_number) {}

  std::string iri(const char* role) {
    skip_space();
    if (at_end()) fail(std::string("missing ") + role);
    if (line_[pos_] == '_' && pos_ + 1 < line_.size() && line_[pos_ + 1] == ':') {
      fail("blank nodes are not supported");
    }
    if (line_[pos_] != '<') fail(std::string("expected IRI for ") + role);
    const std::size_t close = line_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated IRI");
    std::string out(line_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

  std::string object() {
    skip_space();
    if (!at_end() && line_[pos_] == '"') return literal();
    return iri("object");
  }

  void terminator() {
    skip_space();
    if (at_end() || line_[pos_] != '.') fail("unterminated statement (missing '.')");
    ++pos_;
    skip_space();
    if (!at_end() && line_[pos_] != '#') fail("unexpected content after '.'");
  }

 private:
  // Literals are kept verbatim (quotes and any @lang / ^^<type> suffix).
  std::string literal() {
    const std::size_t begin = pos_;
    std::size_t i = pos_ + 1;
    for (; i < line_.size(); ++i) {
      if (line_[i] == '\\') {
        ++i;
      } else if (line_[i] == '"') {
        break;
      }
    }
    if (i >= line_.size()) fail("unterminated literal");
    ++i;
    if (i < line_.size() && line_[i] == '@') {
      while (i < line_.size() && !is_space(line_[i])) ++i;
    } else if (i + 1 < line_.size() && line_[i] == '^' && line_[i + 1] == '^') {
      const std::size_t close = line_.find('>', i);
      if (close == std::string_view::npos) fail("unterminated datatype IRI");
      i = close + 1;
    }
    pos_ = i;
    return std::string(line_.substr(begin, i - begin));
  }

  void skip_space() {
    while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
  }
  bool at_end() const { return pos_ >= line_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(file_, line_number_, what);
  }

  std::string_view line_;
  const std::string& file_;
  std::size_t line_number_;
  std::size_t pos_ = 0;
};

std::optional<RawTriple> parse_ntriples(std::string_view line, const std::string& file,
                                        std::size_t line_number) {
  TermScanner scanner(line, file, line_number);
  RawTriple t;
  t.subject = scanner.iri("subject");
  t.predicate = scanner.iri("predicate");
  t.object = scanner.object();
  scanner.terminator();
  return t;
}

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = raw(t.subject);
    h = h * 0x9E3779B97F4A7C15ULL + raw(t.predicate);
    h = h * 0x9E3779B97F4A7C15ULL + raw(t.object);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

class TripleSetBuilder {
 public:
  void add(const RawTriple& r) {
    const Triple t{set_.symbols.intern_entity(r.subject), set_.symbols.intern_predicate(r.predicate),
                   set_.symbols.intern_entity(r.object)};
    if (seen_.insert(t).second) set_.triples.push_back(t);
  }

  TripleSet finish() && { return std::move(set_); }
  TripleSet& set() { return set_; }

 private:
  TripleSet set_;
  std::unordered_set<Triple, TripleHash> seen_;
};

}  // namespace

TripleFormat parse_format(std::string_view name) {
  if (name == "tsv") return TripleFormat::kTsv;
  if (name == "ntriples" || name == "nt") return TripleFormat::kNTriples;
  throw ConfigError("unknown triple format '" + std::string(name) + "' (expected tsv or ntriples)");
}

std::string_view format_name(TripleFormat format) {
  return format == TripleFormat::kTsv ? "tsv" : "ntriples";
}

std::uint32_t Interner::intern(std::string_view label) {
  std::string key(label);
  auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(labels_.size()));
  if (inserted) labels_.push_back(std::move(key));
  return it->second;
}

std::optional<std::uint32_t> Interner::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityId> SymbolTable::find_entity(std::string_view label) const {
  if (auto id = entities_.find(label)) return EntityId{*id};
  return std::nullopt;
}

std::optional<PredicateId> SymbolTable::find_predicate(std::string_view label) const {
  if (auto id = predicates_.find(label)) return PredicateId{*id};
  return std::nullopt;
}

RawTriple TripleSet::resolve(const Triple& t) const {
  return {symbols.entity(t.subject), symbols.predicate(t.predicate), symbols.entity(t.object)};
}

std::optional<RawTriple> parse_line(std::string_view line, TripleFormat format,
                                    const std::string& file, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::string_view content = trim_left(line);
  if (content.empty() || content.front() == '#') return std::nullopt;
  if (format == TripleFormat::kTsv) return parse_tsv(line, file, line_number);
  return parse_ntriples(line, file, line_number);
}

void parse_triples(const std::filesystem::path& path, TripleFormat format,
                   const std::function<void(RawTriple&&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string file = path.string();
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto t = parse_line(line, format, file, line_number)) sink(std::move(*t));
  }
  if (in.bad()) throw IoError("read error on " + file);
}

std::vector<RawTriple> read_triples(const std::filesystem::path& path, TripleFormat format) {
  std::vector<RawTriple> out;
  parse_triples(path, format, [&](RawTriple&& t) { out.push_back(std::move(t)); });
  return out;
}

TripleSet join_splits(const std::vector<std::filesystem::path>& paths, TripleFormat format,
                      std::size_t jobs) {
  if (paths.empty()) throw ConfigError("no input files given");

  // Parse concurrently, intern serially in declared order.
  std::vector<std::vector<RawTriple>> parsed(paths.size());
  if (jobs <= 1 || paths.size() == 1) {
    for (std::size_t i = 0; i < paths.size(); ++i) parsed[i] = read_triples(paths[i], format);
  } else {
    std::vector<std::future<std::vector<RawTriple>>> pending;
    pending.reserve(paths.size());
    for (const auto& p : paths) {
      pending.push_back(std::async(std::launch::async, [&p, format] { return read_triples(p, format); }));
    }
    for (std::size_t i = 0; i < paths.size(); ++i) parsed[i] = pending[i].get();
  }

  TripleSetBuilder builder;
  for (const auto& file : parsed) {
    for (const auto& t : file) builder.add(t);
  }
  builder.set().sources = paths;
  TripleSet set = std::move(builder).finish();
  if (set.triples.empty()) throw Error("no triples");
  return set;
}

TripleSet make_triple_set(const std::vector<RawTriple>& raw_triples) {
  TripleSetBuilder builder;
  for (const auto& t : raw_triples) builder.add(t);
  return std::move(builder).finish();
}

void write_tsv(const TripleSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : set.triples) {
    out << set.symbols.entity(t.subject) << '\t' << set.symbols.predicate(t.predicate) << '\t'
        << set.symbols.entity(t.object) << '\n';
  }
  if (!out) throw IoError("write error on " + path.string());
}

}  // namespace kghier
