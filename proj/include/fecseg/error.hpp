#pragma once

#include <stdexcept>
#include <string>

namespace fecseg {

enum class ErrorCode {
  kInvalidParameter,
  kNonFinite,
  kFormat,
  kIo,
  kLengthMismatch,
  kConfig,
};

/// Base of every error raised by the library. The code maps one-to-one onto
/// the status values of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorCode::kInvalidParameter, what) {}
};

/// A coordinate was NaN or infinite. `record` is the 0-based index of the
/// offending point in ingestion order.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::size_t record, const std::string& what)
      : Error(ErrorCode::kNonFinite, what), record_(record) {}

  [[nodiscard]] std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCode::kFormat, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class LengthMismatchError : public Error {
 public:
  LengthMismatchError(std::size_t lhs, std::size_t rhs)
      : Error(ErrorCode::kLengthMismatch,
              "length mismatch: " + std::to_string(lhs) + " vs " +
                  std::to_string(rhs)) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

}  // namespace fecseg
