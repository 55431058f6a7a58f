#pragma once

#include <stdexcept>
#include <string>

namespace repstat {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad symbols, impossible counts, bad artifacts).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A figure string or a text that could not be parsed. Carries the offending position.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : DataError(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// The model cannot produce a number: undefined weight, non-finite prior, degenerate urn.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace repstat
