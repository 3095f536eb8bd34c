#pragma once

#include <stdexcept>
#include <string>

namespace accent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input bytes or text do not follow the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix widths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular covariance, no convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace accent
