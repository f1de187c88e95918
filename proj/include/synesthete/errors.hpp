#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synesthete {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on caller-supplied values (non-finite inputs,
// negative regularization strength, bad ranges).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidLandmarks : public Error {
 public:
  using Error::Error;
};

// Stream parsing failure; carries the 1-based line number of the offending
// record.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Unregularized normal equations were rank-deficient.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  UnknownLabel(const std::string& label, std::size_t row)
      : Error("unknown emotion label '" + label + "' at row " +
              std::to_string(row)),
        label_(label),
        row_(row) {}

  const std::string& label() const noexcept { return label_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string label_;
  std::size_t row_;
};

class EmptyTable : public Error {
 public:
  using Error::Error;
};

// Solver asked for a zero-size bottleneck.
class Degenerate : public Error {
 public:
  using Error::Error;
};

// Wire-protocol decode failures.
class BadSync : public Error {
 public:
  using Error::Error;
};

class BadChecksum : public Error {
 public:
  using Error::Error;
};

class BadFrameSize : public Error {
 public:
  using Error::Error;
};

// Device sink failures.
class PortUnavailable : public Error {
 public:
  using Error::Error;
};

class WriteTimeout : public Error {
 public:
  using Error::Error;
};

}  // namespace synesthete
