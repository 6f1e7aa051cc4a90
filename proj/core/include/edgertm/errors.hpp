#pragma once

#include <stdexcept>
#include <string>

namespace edgertm {

/// Base of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An API or CLI was called in a way its contract forbids.
struct UsageError : Error {
  using Error::Error;
};

/// Input with a non-positive or otherwise out-of-domain numeric argument.
struct DomainError : Error {
  using Error::Error;
};

/// Malformed input text. `line` is 1-based when known (0 otherwise).
struct ParseError : Error {
  ParseError(const std::string& message, int line_number = 0)
      : Error(message), line(line_number) {}
  int line;
};

/// Two rows share a (workload, config level, resource) key.
struct DuplicateKeyError : Error {
  DuplicateKeyError(const std::string& message, int line_number = 0)
      : Error(message), line(line_number) {}
  int line;
};

/// Well-formed input that violates a declared data invariant.
struct InvariantError : Error {
  InvariantError(const std::string& message, int line_number = 0)
      : Error(message), line(line_number) {}
  int line;
};

/// Allocation failed because the requested cores/capacity are in use.
struct ContentionError : Error {
  using Error::Error;
};

/// A workload was queried outside its [arrival, exit) window.
struct LifecycleError : Error {
  using Error::Error;
};

/// A structured file (scenario, platform) failed schema validation.
/// `path` points at the offending field, e.g. "events[2].at_ms".
struct SchemaError : Error {
  SchemaError(const std::string& field_path, const std::string& message)
      : Error(field_path + ": " + message), path(field_path) {}
  std::string path;
};

} // namespace edgertm
