#pragma once

#include <stdexcept>
#include <string>

namespace simtrack {

/// Input that violates a documented invariant (bad flags, malformed data,
/// inconsistent matrices). The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model/head combinations that cannot work together.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Frames delivered out of order.
class SequencingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Too many malformed rows in an input file.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Unreadable or unwritable files. The CLI maps it to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simtrack
