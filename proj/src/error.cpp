#include "kghier/error.hpp"

#include <utility>

namespace kghier {

ParseError::ParseError(std::string file, std::size_t line, const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid document";
  for (const auto& p : problems) {
    out += "\n  ";
    out += p;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace kghier
