#pragma once

#include <stdexcept>
#include <string>

namespace ilm {

/// Base class for every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, int line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Point configuration from which the requested transform is unobservable.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Fewer observations than the estimator's minimum. Callers (e.g. the
/// fusion layer) catch this to skip the measurement update for a frame.
class InsufficientLandmarks : public Error {
 public:
  using Error::Error;
};

/// No hypothesis produced an acceptable pose; caller retries with later frames.
class GlobalInitFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ilm
