#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kghier/export.hpp"
#include "kghier/ingest.hpp"
#include "kghier/similarity.hpp"

namespace kghier {

// Settings shared by every subcommand; each one reads the subset it needs.
struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  TripleFormat format = TripleFormat::kTsv;
  std::size_t alpha = 10;
  double theta = kDefaultTheta;
  std::size_t jobs = 1;
  bool inverse = false;
  SimilarityEngine engine = SimilarityEngine::kIndexed;
  std::filesystem::path output;
  std::string dataset = "kg";
  std::optional<std::size_t> member_sample = kDefaultMemberSample;
  std::optional<std::filesystem::path> dot_path;
  std::optional<std::filesystem::path> viewer_dir;
  std::filesystem::path viewer_bundle;
  std::optional<std::filesystem::path> metrics_path;
};

// Throws ConfigError unless alpha >= 1, 0 < theta <= 1 and jobs >= 1.
void validate_config(const PipelineConfig& config);

// Runs ingest -> grouping -> similarity -> hierarchy -> export. Stage timings
// go to `log`, the hierarchy summary to `out`.
void run_build(const PipelineConfig& config, std::ostream& out, std::ostream& log);

// Entry point of the kghier binary. Exit codes: 0 success, 1 runtime
// failure, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace kghier
