#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "kghier/cli.hpp"
#include "kghier/error.hpp"
#include "support/fixtures.hpp"

namespace kghier {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { dir = testing::fresh_temp_dir("cli"); }
  void TearDown() override {
    fs::remove_all(dir);
    unsetenv("KGHIER_JOBS");
  }

  std::string venn() const { return (testing::data_dir() / "venn.tsv").string(); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  fs::path dir;
};

TEST_F(CliTest, BuildVenn) {
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "--theta", "0.9", "-o",
                     path("h.json"), "--dot", path("h.dot"), "--dataset", "venn"}),
            0);
  const auto doc = read_document(path("h.json"));
  EXPECT_EQ(doc.metadata.dataset, "venn");
  EXPECT_EQ(doc.metadata.node_count, 4u);
  ASSERT_EQ(doc.tree.children.size(), 1u);
  EXPECT_EQ(doc.tree.children[0].name, "LiveIn_Europe");
  EXPECT_EQ(read_text_file(path("h.dot")), dot_text(doc));
}

TEST_F(CliTest, NTriplesInputGivesSameDocument) {
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-o", path("a.json")}), 0);
  ASSERT_EQ(run_cli({"build", "-i", (testing::data_dir() / "venn.nt").string(), "--format",
                     "ntriples", "--min-group-size", "1", "-o", path("b.json")}),
            0);
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli({"build", "-i", venn(), "--theta", "1.5", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"build", "-i", venn(), "--theta", "0", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "0", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"build", "-i", venn(), "--format", "xml", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"build", "-i", venn(), "--engine", "fast", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"build", "-o", path("h.json")}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli(std::vector<std::string>{}), 2);
  EXPECT_FALSE(fs::exists(path("h.json")));
}

TEST_F(CliTest, RuntimeFailuresExitOne) {
  EXPECT_EQ(run_cli({"build", "-i", path("missing.tsv"), "-o", path("h.json")}), 1);
  write_text_file(path("bad.tsv"), "a\tb\n");
  EXPECT_EQ(run_cli({"build", "-i", path("bad.tsv"), "-o", path("h.json")}), 1);
  EXPECT_EQ(run_cli({"export", "--document", path("missing.json"), "--dot", path("x.dot")}), 1);
}

TEST_F(CliTest, StagedCommandsMatchBuild) {
  std::mt19937_64 rng(77);
  std::string text;
  for (const auto& t : testing::random_graph(rng, 3000, 400, 6, 40)) {
    text += t.subject + "\t" + t.predicate + "\t" + t.object + "\n";
  }
  write_text_file(path("kg.tsv"), text);
  const std::vector<std::string> common{"--min-group-size", "4", "-j", "3"};
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), common.begin(), common.end());
    return args;
  };
  ASSERT_EQ(run_cli(with({"build", "-i", path("kg.tsv"), "-o", path("build.json")})), 0);
  ASSERT_EQ(run_cli(with({"groups", "-i", path("kg.tsv"), "-o", path("groups.json")})), 0);
  ASSERT_EQ(run_cli(with({"sim", "--groups", path("groups.json"), "-o", path("sim.csv")})), 0);
  ASSERT_EQ(run_cli(with({"hier", "--groups", path("groups.json"), "--sim", path("sim.csv"),
                          "-o", path("staged.json")})),
            0);
  EXPECT_EQ(read_text_file(path("staged.json")), read_text_file(path("build.json")));
  // hier can also compute similarities itself.
  ASSERT_EQ(run_cli(with({"hier", "--groups", path("groups.json"), "-o", path("direct.json")})), 0);
  EXPECT_EQ(read_text_file(path("direct.json")), read_text_file(path("build.json")));
}

TEST_F(CliTest, JobsFromEnvironmentAndMetrics) {
  setenv("KGHIER_JOBS", "3", 1);
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-o", path("h.json"),
                     "--metrics", path("m.json")}),
            0);
  const auto m = json::parse(read_text_file(path("m.json")));
  EXPECT_EQ(m["jobs"], 3);
  EXPECT_EQ(m["counts"]["triples"], 12);
  EXPECT_EQ(m["counts"]["groups"], 4);
  EXPECT_EQ(m["counts"]["nodes"], 4);
  EXPECT_EQ(m["counts"]["edges"], 3);
  for (const char* stage : {"ingest", "groups", "similarity", "hierarchy", "export"}) {
    EXPECT_TRUE(m["stage_seconds"].contains(stage)) << stage;
  }
  // An explicit flag wins over the environment.
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-j", "2", "-o",
                     path("h.json"), "--metrics", path("m.json")}),
            0);
  EXPECT_EQ(json::parse(read_text_file(path("m.json")))["jobs"], 2);
}

TEST_F(CliTest, ExportSubcommand) {
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-o", path("h.json")}), 0);
  ASSERT_EQ(run_cli({"export", "--document", path("h.json"), "--dot", path("h.dot"), "--json",
                     path("copy.json")}),
            0);
  EXPECT_EQ(read_text_file(path("copy.json")), read_text_file(path("h.json")));
  EXPECT_EQ(read_text_file(path("h.dot")), dot_text(read_document(path("h.json"))));
  EXPECT_EQ(run_cli({"export", "--document", path("h.json")}), 2);
}

TEST_F(CliTest, RenderSubcommand) {
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-o", path("h.json")}), 0);
  EXPECT_EQ(run_cli({"render", "--document", path("h.json"), "--output-dir", path("site"),
                     "--viewer-bundle", path("no_bundle")}),
            1);
  fs::create_directories(dir / "bundle");
  write_text_file(dir / "bundle" / "index.html", "<html></html>\n");
  ASSERT_EQ(run_cli({"render", "--document", path("h.json"), "--output-dir", path("site"),
                     "--viewer-bundle", path("bundle")}),
            0);
  EXPECT_TRUE(fs::exists(dir / "site" / "index.html"));
  EXPECT_EQ(read_text_file(dir / "site" / "hierarchy.json"), read_text_file(path("h.json")));
  // build --viewer-dir produces the same directory in one step.
  ASSERT_EQ(run_cli({"build", "-i", venn(), "--min-group-size", "1", "-o", path("h2.json"),
                     "--viewer-dir", path("site2"), "--viewer-bundle", path("bundle")}),
            0);
  EXPECT_EQ(read_text_file(dir / "site2" / "hierarchy.json"), read_text_file(path("h.json")));
}

TEST(ValidateConfig, Ranges) {
  PipelineConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.theta = 1.0;
  EXPECT_NO_THROW(validate_config(c));
  c.theta = std::nan("");
  EXPECT_THROW(validate_config(c), ConfigError);
  c.theta = 0.5;
  c.jobs = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
  c.jobs = 1;
  c.member_sample = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
}

}  // namespace
}  // namespace kghier
