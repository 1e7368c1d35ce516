#pragma once

#include <stdexcept>
#include <string>

namespace ucgan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image shapes disagree. The message names the offending axis.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, truncation, unknown version).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed data that breaks a domain invariant (e.g. pixel above bit depth).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Metric inputs carry no usable information (all windows flat, zero band mean).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Training diverged; the message names the loss term and the iteration.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace ucgan
