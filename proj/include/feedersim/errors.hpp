#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace feedersim {

/// Invalid configuration: bad ranges, unknown keys, inconsistent executor settings.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based and counts the header.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line)
  {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Failure while an executor is running (worker crash, lost channel, timeout).
class ExecutionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace feedersim
