#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causal2d {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: bad rectangles, wrong array sizes, non-finite samples.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A test function's support does not sit inside the grid with the required margin.
class MarginViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain faults while evaluating an expression (division by zero, sqrt of a negative, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

class InvalidOrientationPair : public Error {
 public:
  using Error::Error;
};

class NotHomeomorphism : public Error {
 public:
  using Error::Error;
};

class NotBijective : public Error {
 public:
  using Error::Error;
};

class NonMonotone : public Error {
 public:
  using Error::Error;
};

/// A decomposition was asked for while its weak-derivative precondition fails.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace causal2d
