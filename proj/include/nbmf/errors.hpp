#pragma once

#include <stdexcept>
#include <string>

namespace nbmf {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value (fraction out of range, K = 0, bad hyperparameters).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed token in an input file; the message carries the location.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what + " at row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1)),
        row_(row),
        col_(col) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// Ragged, empty or mismatched dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition (e.g. asked for conditional
// weights of a cell whose counters were not detached).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Internal state violates an invariant that the algorithms rely on.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// No valid latent configuration exists (Dir-Dir with K = 1 and observed zeros).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Requested model/engine combination is not provided.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Exhaustive computation would exceed its configured size bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nbmf
