#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdes {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input file. `line()` is 1-based for text
// formats and 0 when not applicable (binary formats report a record index
// in the message instead).
class FormatError : public Error {
 public:
  enum class Kind {
    kEmptyFile,
    kRaggedRow,
    kMalformedNumber,
    kNonFinite,
    kBadMagic,
    kUnsupportedVersion,
    kTruncated,
    kZeroDimension,
    kMissingField,
    kEmptyCandidate,
    kDuplicateId,
    kBadTag,
    kIo,
  };

  FormatError(Kind kind, const std::string& path, std::size_t line,
              const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

 private:
  Kind kind_;
  std::string path_;
  std::size_t line_;
};

const char* to_string(FormatError::Kind kind);

// Vector lengths or model shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Lookup of an id that the relevant structure does not hold.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or configuration detected before any work starts.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during optimisation.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdes
