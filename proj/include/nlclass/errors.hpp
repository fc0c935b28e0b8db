#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlclass {

// Base of every error raised by the library. Commands map subclasses onto
// process exit codes (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownVariable : public Error {
 public:
  using Error::Error;
};

class UnknownFunction : public Error {
 public:
  using Error::Error;
};

class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NecessityViolated : public Error {
 public:
  using Error::Error;
};

class NegativeEpsilon : public Error {
 public:
  using Error::Error;
};

// Alternating projections stalled without producing a certificate. This is
// never a proof of infeasibility.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

// Malformed input file; `field` is the path of the offending entry ("B",
// "omega[1]", ...).
class InputError : public Error {
 public:
  InputError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace nlclass
