#pragma once

#include <stdexcept>
#include <string>

namespace orbitsiege {

// Input that is not well-formed text/JSON/CSV.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant. `field` is a dotted
// path into the scenario (e.g. "satellites[2].capacity_bytes").
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfHorizon : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class BadChecksum : public ParseError {
 public:
  using ParseError::ParseError;
};

class BadLayout : public ParseError {
 public:
  using ParseError::ParseError;
};

class StaleElements : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No assignment of min(rows, cols) pairs avoids the forbidden cells.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace orbitsiege
