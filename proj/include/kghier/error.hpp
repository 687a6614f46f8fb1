#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kghier {

// Base class for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input line. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Invalid user-supplied parameter (alpha, theta, jobs, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs that are individually valid but inconsistent with each other.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Document failed validation; `problems` names each offending key.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace kghier
