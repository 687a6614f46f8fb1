#include "kghier/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "kghier/error.hpp"
#include "kghier/grouping.hpp"
#include "kghier/hierarchy.hpp"
#include "kghier/parallel.hpp"

namespace kghier {

namespace fs = std::filesystem;

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::ostream& log) : log_(log) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    log_ << std::left << std::setw(12) << stage << std::fixed << std::setprecision(3)
         << elapsed.count() << "s\n";
    stages_.emplace_back(stage, elapsed.count());
    return result;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [name, secs] : stages_) out[name] = secs;
    return out;
  }

 private:
  std::ostream& log_;
  std::vector<std::pair<std::string, double>> stages_;
};

void print_group_summary(const GroupStats& stats, std::ostream& out) {
  out << "groups: " << stats.group_count << "\n"
      << "memberships: " << stats.membership_count << "\n"
      << "distinct members: " << stats.distinct_members << "\n";
  out << "size histogram:\n";
  for (const auto& b : stats.histogram) {
    out << "  [" << b.lower << ", " << b.upper << "): " << b.count << "\n";
  }
  if (!stats.largest.empty()) out << "largest groups:\n";
  for (const auto& [name, size] : stats.largest) out << "  " << name << "\t" << size << "\n";
}

void print_dag_summary(const DagStats& s, std::ostream& out) {
  out << "nodes: " << s.node_count << "\n"
      << "edges: " << s.edge_count << "\n"
      << "roots: " << s.root_count << "\n"
      << "max depth: " << s.max_depth << "\n"
      << "grouped aliases: " << s.alias_count << " (" << s.merged_nodes
      << " merged nodes, largest class " << s.max_aliases << ")\n";
}

ExportOptions export_options(const PipelineConfig& config) {
  return ExportOptions{config.dataset, config.member_sample};
}

GroupingOptions grouping_options(const PipelineConfig& config) {
  return GroupingOptions{config.alpha, config.jobs, config.inverse};
}

fs::path default_viewer_bundle() {
  if (const char* env = std::getenv("KGHIER_VIEWER_BUNDLE"); env != nullptr && *env != '\0') {
    return env;
  }
  return "viewer/dist";
}

// Flags as typed on the command line, before conversion.
struct RawFlags {
  std::vector<std::string> inputs;
  std::string format = "tsv";
  std::size_t alpha = 10;
  double theta = kDefaultTheta;
  std::size_t jobs = 0;
  bool inverse = false;
  std::string engine = "indexed";
  std::string output;
  std::string dataset = "kg";
  std::size_t member_sample = kDefaultMemberSample;
  bool full_members = false;
  std::string dot;
  std::string viewer_dir;
  std::string viewer_bundle;
  std::string metrics;
  std::string groups_file;
  std::string sim_file;
  std::string document;
  std::string json_out;
  std::size_t top = 10;
};

PipelineConfig to_config(const RawFlags& raw) {
  PipelineConfig c;
  for (const auto& in : raw.inputs) c.inputs.emplace_back(in);
  c.format = parse_format(raw.format);
  c.alpha = raw.alpha;
  c.theta = raw.theta;
  c.jobs = raw.jobs == 0 ? default_jobs() : raw.jobs;
  c.inverse = raw.inverse;
  c.engine = parse_engine(raw.engine);
  c.output = raw.output;
  c.dataset = raw.dataset;
  c.member_sample = raw.full_members ? std::nullopt : std::optional<std::size_t>(raw.member_sample);
  if (!raw.dot.empty()) c.dot_path = raw.dot;
  if (!raw.viewer_dir.empty()) c.viewer_dir = raw.viewer_dir;
  c.viewer_bundle = raw.viewer_bundle.empty() ? default_viewer_bundle() : fs::path(raw.viewer_bundle);
  if (!raw.metrics.empty()) c.metrics_path = raw.metrics;
  return c;
}

void add_input_flags(CLI::App& cmd, RawFlags& raw, bool required) {
  auto* opt = cmd.add_option("-i,--input", raw.inputs, "Triple files; dataset splits are joined");
  if (required) opt->required();
  cmd.add_option("--format", raw.format, "Input format: tsv or ntriples")->capture_default_str();
  cmd.add_option("--min-group-size", raw.alpha, "Minimum group size (alpha)")->capture_default_str();
  cmd.add_flag("--inverse", raw.inverse, "Also group objects by (subject, predicate)");
}

void add_jobs_flag(CLI::App& cmd, RawFlags& raw) {
  cmd.add_option("-j,--jobs", raw.jobs,
                 "Parallel jobs (default: KGHIER_JOBS or the number of CPUs)");
}

void add_hierarchy_flags(CLI::App& cmd, RawFlags& raw) {
  cmd.add_option("--theta", raw.theta, "HPI containment threshold in (0, 1]")->capture_default_str();
  cmd.add_option("--dataset", raw.dataset, "Dataset name stored in the document")->capture_default_str();
  cmd.add_option("--member-sample", raw.member_sample, "Members embedded per node")
      ->capture_default_str();
  cmd.add_flag("--full-members", raw.full_members, "Embed full membership instead of a sample");
  cmd.add_option("--dot", raw.dot, "Also write the dag as a Graphviz file");
}

void add_engine_flag(CLI::App& cmd, RawFlags& raw) {
  cmd.add_option("--engine", raw.engine, "Similarity engine: indexed or bruteforce")
      ->capture_default_str();
}

void write_metrics(const fs::path& path, const PipelineConfig& config, const StageTimer& timer,
                   nlohmann::ordered_json counts) {
  nlohmann::ordered_json m;
  m["jobs"] = config.jobs;
  m["engine"] = config.engine == SimilarityEngine::kIndexed ? "indexed" : "bruteforce";
  m["min_group_size"] = config.alpha;
  m["theta"] = config.theta;
  m["counts"] = std::move(counts);
  m["stage_seconds"] = timer.to_json();
  write_text_file(path, m.dump(2) + "\n");
}

GroupTable load_or_generate_groups(const RawFlags& raw, const PipelineConfig& config,
                                   StageTimer& timer) {
  if (!raw.groups_file.empty()) {
    return timer.run("groups", [&] { return read_groups(raw.groups_file, config.alpha); });
  }
  if (config.inputs.empty()) throw ConfigError("either --groups or --input is required");
  const TripleSet triples =
      timer.run("ingest", [&] { return join_splits(config.inputs, config.format, config.jobs); });
  return timer.run("groups", [&] { return generate_groups(triples, grouping_options(config)); });
}

int cmd_groups(const RawFlags& raw, std::ostream& out, std::ostream& log) {
  const PipelineConfig config = to_config(raw);
  validate_config(config);
  StageTimer timer(log);
  const TripleSet triples =
      timer.run("ingest", [&] { return join_splits(config.inputs, config.format, config.jobs); });
  const GroupTable table =
      timer.run("groups", [&] { return generate_groups(triples, grouping_options(config)); });
  log << "triples   " << triples.size() << "\n";
  print_group_summary(group_stats(table, raw.top), out);
  if (!config.output.empty()) write_groups(table, config.output);
  return 0;
}

int cmd_sim(const RawFlags& raw, std::ostream& out, std::ostream& log) {
  const PipelineConfig config = to_config(raw);
  validate_config(config);
  StageTimer timer(log);
  const GroupTable table = load_or_generate_groups(raw, config, timer);
  const SimilarityMatrix matrix =
      timer.run("similarity", [&] { return all_pairs(table, config.engine, config.jobs); });
  if (config.output.empty()) {
    out << matrix_to_csv(table, matrix);
  } else {
    write_matrix_csv(table, matrix, config.output);
    out << "records: " << matrix.records.size() << "\n";
  }
  return 0;
}

int cmd_hier(const RawFlags& raw, std::ostream& out, std::ostream& log) {
  PipelineConfig config = to_config(raw);
  validate_config(config);
  if (config.output.empty()) throw ConfigError("--output is required");
  StageTimer timer(log);
  const GroupTable table = load_or_generate_groups(raw, config, timer);
  const SimilarityMatrix matrix = timer.run("similarity", [&] {
    if (!raw.sim_file.empty()) return read_matrix_csv(table, raw.sim_file);
    return all_pairs(table, config.engine, config.jobs);
  });
  const HierarchyDag dag = timer.run("hierarchy", [&] { return build_hierarchy(table, matrix, config.theta); });
  export_json(dag, table, export_options(config), config.output);
  if (config.dot_path) export_dot(dag, *config.dot_path);
  print_dag_summary(dag_stats(dag), out);
  return 0;
}

int cmd_export(const RawFlags& raw, std::ostream& out) {
  if (raw.document.empty()) throw ConfigError("--document is required");
  if (raw.dot.empty() && raw.json_out.empty()) throw ConfigError("nothing to do: pass --dot and/or --json");
  const HierarchyDocument doc = read_document(raw.document);
  if (!raw.dot.empty()) write_text_file(raw.dot, dot_text(doc));
  if (!raw.json_out.empty()) write_text_file(raw.json_out, serialize_document(doc));
  out << "nodes: " << doc.nodes.size() << "\nedges: " << doc.dag_edges.size() << "\n";
  return 0;
}

int cmd_render(const RawFlags& raw, std::ostream& out) {
  if (raw.document.empty()) throw ConfigError("--document is required");
  if (raw.viewer_dir.empty()) throw ConfigError("--output-dir is required");
  const fs::path bundle = raw.viewer_bundle.empty() ? default_viewer_bundle() : fs::path(raw.viewer_bundle);
  emit_viewer(raw.document, raw.viewer_dir, bundle);
  out << "viewer written to " << raw.viewer_dir << "/" << kViewerEntryPage << "\n";
  return 0;
}

}  // namespace

void validate_config(const PipelineConfig& config) {
  if (config.alpha < 1) throw ConfigError("--min-group-size must be >= 1");
  if (!(config.theta > 0.0 && config.theta <= 1.0)) throw ConfigError("--theta must be in (0, 1]");
  if (config.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (config.member_sample && *config.member_sample == 0) {
    throw ConfigError("--member-sample must be >= 1 (use --full-members for everything)");
  }
}

void run_build(const PipelineConfig& config, std::ostream& out, std::ostream& log) {
  validate_config(config);
  if (config.inputs.empty()) throw ConfigError("at least one --input is required");
  if (config.output.empty()) throw ConfigError("--output is required");

  StageTimer timer(log);
  const TripleSet triples =
      timer.run("ingest", [&] { return join_splits(config.inputs, config.format, config.jobs); });
  const GroupTable table =
      timer.run("groups", [&] { return generate_groups(triples, grouping_options(config)); });
  const SimilarityMatrix matrix =
      timer.run("similarity", [&] { return all_pairs(table, config.engine, config.jobs); });
  const HierarchyDag dag =
      timer.run("hierarchy", [&] { return build_hierarchy(table, matrix, config.theta); });
  timer.run("export", [&] {
    export_json(dag, table, export_options(config), config.output);
    if (config.dot_path) export_dot(dag, *config.dot_path);
    if (config.viewer_dir) emit_viewer(config.output, *config.viewer_dir, config.viewer_bundle);
    return 0;
  });

  const DagStats stats = dag_stats(dag);
  out << "triples: " << triples.size() << "\n"
      << "groups: " << table.size() << "\n"
      << "similarity records: " << matrix.records.size() << "\n";
  print_dag_summary(stats, out);

  if (config.metrics_path) {
    nlohmann::ordered_json counts;
    counts["triples"] = triples.size();
    counts["entities"] = triples.symbols.entities().size();
    counts["predicates"] = triples.symbols.predicates().size();
    counts["groups"] = table.size();
    counts["similarity_records"] = matrix.records.size();
    counts["nodes"] = stats.node_count;
    counts["edges"] = stats.edge_count;
    counts["roots"] = stats.root_count;
    counts["max_depth"] = stats.max_depth;
    write_metrics(*config.metrics_path, config, timer, std::move(counts));
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Unsupervised hierarchical grouping of knowledge-graph entities", "kghier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  RawFlags raw;

  auto* build = app.add_subcommand("build", "Run the whole pipeline and write the hierarchy document");
  add_input_flags(*build, raw, true);
  add_jobs_flag(*build, raw);
  add_engine_flag(*build, raw);
  add_hierarchy_flags(*build, raw);
  build->add_option("-o,--output", raw.output, "Hierarchy JSON path")->required();
  build->add_option("--viewer-dir", raw.viewer_dir, "Also emit a viewer directory here");
  build->add_option("--viewer-bundle", raw.viewer_bundle, "Prebuilt viewer bundle directory");
  build->add_option("--metrics", raw.metrics, "Write stage timings and counts as JSON");

  auto* groups = app.add_subcommand("groups", "Generate entity groups and print a summary");
  add_input_flags(*groups, raw, true);
  add_jobs_flag(*groups, raw);
  groups->add_option("-o,--output", raw.output, "Dump groups as JSON");
  groups->add_option("--top", raw.top, "Largest groups to list")->capture_default_str();

  auto* sim = app.add_subcommand("sim", "Compute pairwise group similarities as CSV");
  add_input_flags(*sim, raw, false);
  add_jobs_flag(*sim, raw);
  add_engine_flag(*sim, raw);
  sim->add_option("--groups", raw.groups_file, "Group dump from `groups -o`");
  sim->add_option("-o,--output", raw.output, "CSV path (default: stdout)");

  auto* hier = app.add_subcommand("hier", "Build the hierarchy from groups and similarities");
  add_input_flags(*hier, raw, false);
  add_jobs_flag(*hier, raw);
  add_engine_flag(*hier, raw);
  add_hierarchy_flags(*hier, raw);
  hier->add_option("--groups", raw.groups_file, "Group dump from `groups -o`");
  hier->add_option("--sim", raw.sim_file, "Similarity CSV from `sim -o`");
  hier->add_option("-o,--output", raw.output, "Hierarchy JSON path")->required();

  auto* exp = app.add_subcommand("export", "Convert a hierarchy document to other formats");
  exp->add_option("--document", raw.document, "Hierarchy JSON")->required();
  exp->add_option("--dot", raw.dot, "Graphviz output path");
  exp->add_option("--json", raw.json_out, "Canonical JSON output path");

  auto* render = app.add_subcommand("render", "Package the viewer with a hierarchy document");
  render->add_option("--document", raw.document, "Hierarchy JSON")->required();
  render->add_option("--output-dir", raw.viewer_dir, "Output directory")->required();
  render->add_option("--viewer-bundle", raw.viewer_bundle,
                     "Prebuilt viewer bundle (default: KGHIER_VIEWER_BUNDLE or viewer/dist)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      run_build(to_config(raw), std::cout, std::cerr);
      return 0;
    }
    if (groups->parsed()) return cmd_groups(raw, std::cout, std::cerr);
    if (sim->parsed()) return cmd_sim(raw, std::cout, std::cerr);
    if (hier->parsed()) return cmd_hier(raw, std::cout, std::cerr);
    if (exp->parsed()) return cmd_export(raw, std::cout);
    if (render->parsed()) return cmd_render(raw, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "kghier: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kghier: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("kghier");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kghier
