#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulse {

/// Invalid configuration: lexicons, detector knobs, scenarios, service config.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON/JSONL input. `line()` is 1-based; 0 means "whole document".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A bucket query reached outside the store's retained seconds.
class OutOfRetention : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class UnknownGame : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Stream source failure (connection lost, adapter gave up).
class SourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pulse
