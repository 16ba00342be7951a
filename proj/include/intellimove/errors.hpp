#pragma once

#include <stdexcept>
#include <string>

namespace intellimove {

// Base of every error thrown by the library. Each subclass maps to one
// failure class so callers (the CLI in particular) can pick an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

// No route between two traversable cells (or two rooms). Kept distinct so
// the planner can skip a candidate goal instead of failing outright.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

class DiscoveryFailedError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw_payload)
      : Error(what), raw_(std::move(raw_payload)) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  const std::string& raw_payload() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class CorruptArchiveError : public Error {
 public:
  using Error::Error;
};

// Graph and raster disagree (e.g. a room whose cells cannot reach each other).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace intellimove
