#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recallm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed a value outside an operation's domain (e.g. λ < 1, k = 0).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data. offset is the byte position where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// A concept batch that violates its own invariants, e.g. a relation endpoint
// that is not one of the batch's concepts.
class InvalidBatchError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what, int status = 0, bool retryable = false)
      : Error(what), status_(status), retryable_(retryable) {}
  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

// Retries exhausted on timeouts or server errors.
class ProviderTimeout : public ProviderError {
 public:
  explicit ProviderTimeout(const std::string& what, int status = 0)
      : ProviderError(what, status, true) {}
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  DatasetError(const std::string& section, const std::string& what)
      : Error(section.empty() ? what : "[" + section + "] " + what), section_(section) {}
  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

class GradeError : public Error {
 public:
  using Error::Error;
};

}  // namespace recallm
