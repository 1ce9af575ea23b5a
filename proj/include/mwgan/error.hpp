#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mwgan {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value (level < 1, bin_count < 2, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A dimension is not divisible by the power of two an operation needs.
class DivisibilityError : public ArgumentError {
 public:
  DivisibilityError(std::string axis, int extent, int divisor)
      : ArgumentError(axis + " extent " + std::to_string(extent) +
                      " is not divisible by " + std::to_string(divisor)),
        axis_(std::move(axis)),
        extent_(extent),
        divisor_(divisor) {}

  const std::string& axis() const noexcept { return axis_; }
  int extent() const noexcept { return extent_; }
  int divisor() const noexcept { return divisor_; }

 private:
  std::string axis_;
  int extent_;
  int divisor_;
};

// Malformed container: wrong band count, mismatched shapes, bad tensor ranks.
class StructureError : public Error {
 public:
  using Error::Error;
};

// Frame / sequence / manifest ingestion failure.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or output during training or inference.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t iteration, std::string term, double value)
      : Error("training diverged at iteration " + std::to_string(iteration) +
              ": term '" + term + "' = " + std::to_string(value)),
        iteration_(iteration),
        term_(std::move(term)) {}

  std::int64_t iteration() const noexcept { return iteration_; }
  const std::string& term() const noexcept { return term_; }

 private:
  std::int64_t iteration_;
  std::string term_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Checksum or framing mismatch in a checkpoint archive.
class IntegrityError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Configuration file problem; line is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace mwgan
