#pragma once

#include <stdexcept>
#include <string>

namespace attnfiqa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (matmul inner dims, tensor manifest shapes, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An index (block, head) outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Input file or value is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A weight set that does not match the manifest derived from a ModelConfig
/// (missing tensor, unexpected tensor).
class ManifestError : public Error {
 public:
  using Error::Error;
};

/// Statistic undefined for the given data (e.g. 1/std of a constant vector).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace attnfiqa
