#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stlgen {

/// Lexical or grammatical error in a formula string. `position` is the
/// byte offset of the offending character in the input.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Interval bounds violate lo >= 0 or lo < hi.
class IntervalError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Semantic evaluation failure: missing channel, unresolved symbolic bound,
/// or a time index outside the trace.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or structurally invalid input data (datasets, signals, configs).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failure of an HTTP client (encoder or completion endpoint).
class HttpError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed after earlier stages completed.
class StageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace stlgen
