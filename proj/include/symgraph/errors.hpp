#pragma once

#include <stdexcept>
#include <string>

namespace symgraph {

/// Invalid argument, out-of-range index or probability.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input line; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The meaning graph admits no pair for a requested hypothesis.
class NoFixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

inline void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace detail
}  // namespace symgraph
