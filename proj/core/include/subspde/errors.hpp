#pragma once

#include <stdexcept>
#include <string>

namespace subspde {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (x < 0, t <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A user supplied evaluator (custom rho, custom density) returned inf or nan.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ThresholdError : public Error {
 public:
  using Error::Error;
};

// Root bracketing ran off to infinity.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// A modelling hypothesis does not hold. hypothesis() is a short stable name
// such as "dalang" or "rough-initial-data".
class PreconditionError : public Error {
 public:
  PreconditionError(std::string hypothesis, const std::string& what);
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

// Malformed experiment or config input.
class SpecError : public Error {
 public:
  using Error::Error;
};

class EstimatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace subspde
