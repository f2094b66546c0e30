#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpld {

/// A population whose units are all equal, or that has fewer than two units.
class DegeneratePopulation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A population that was required to have mean 0 and variance 1 but does not.
class NotStandardized : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed population input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An exact oracle was asked to enumerate more than its size guard allows.
class InstanceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Root finding or another iterative method failed to converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpld
