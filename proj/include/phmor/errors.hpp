#pragma once

#include <stdexcept>
#include <string>

namespace phmor {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// E could not be factorized (descriptor-to-standard transformation).
class SingularE : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be symmetric positive definite is not.
class NotSPD : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// The implicit-midpoint step matrix could not be factorized.
class SingularStep : public Error {
 public:
  using Error::Error;
};

class OracleTooLarge : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class RankDeficientBasis : public Error {
 public:
  using Error::Error;
};

/// A basis passed as an extension does not nest the expected prefix.
class NotNested : public Error {
 public:
  using Error::Error;
};

class NotPrefix : public Error {
 public:
  using Error::Error;
};

/// Assembled reduced blocks violate the structural invariants.
class StructureLost : public Error {
 public:
  using Error::Error;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class AllPointsSkipped : public Error {
 public:
  using Error::Error;
};

class DenseLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// File could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(long line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace phmor
