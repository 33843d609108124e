#pragma once

#include <stdexcept>
#include <string>

namespace privaflow {

enum class ErrorKind {
  // configuration (exit code 2)
  kConfig,
  kUnsupportedSecurityLevel,
  kInvalidK,
  kSeriesTooShort,
  kEmptySplit,
  // protocol (exit code 3)
  kDecode,
  kNotInRange,
  kUnknownDriver,
  kLengthMismatch,
  kMissingDriver,
  kDuplicateDriver,
  kOutOfBounds,
  kInvalidCell,
  kPoolExhausted,
  kDuplicateReport,
  kLateReport,
  kEpochGap,
  // io (exit code 4)
  kIo,
};

const char* to_string(ErrorKind kind);

// Process exit code for the error's category: 2 config, 3 protocol, 4 io.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return privaflow::exit_code(kind_); }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class ErrorOf : public Error {
 public:
  explicit ErrorOf(const std::string& what) : Error(K, what) {}
};

using ConfigError = ErrorOf<ErrorKind::kConfig>;
using UnsupportedSecurityLevel = ErrorOf<ErrorKind::kUnsupportedSecurityLevel>;
using InvalidK = ErrorOf<ErrorKind::kInvalidK>;
using SeriesTooShort = ErrorOf<ErrorKind::kSeriesTooShort>;
using EmptySplit = ErrorOf<ErrorKind::kEmptySplit>;
using DecodeError = ErrorOf<ErrorKind::kDecode>;
using NotInRange = ErrorOf<ErrorKind::kNotInRange>;
using UnknownDriver = ErrorOf<ErrorKind::kUnknownDriver>;
using LengthMismatch = ErrorOf<ErrorKind::kLengthMismatch>;
using MissingDriver = ErrorOf<ErrorKind::kMissingDriver>;
using DuplicateDriver = ErrorOf<ErrorKind::kDuplicateDriver>;
using OutOfBounds = ErrorOf<ErrorKind::kOutOfBounds>;
using InvalidCell = ErrorOf<ErrorKind::kInvalidCell>;
using PoolExhausted = ErrorOf<ErrorKind::kPoolExhausted>;
using DuplicateReport = ErrorOf<ErrorKind::kDuplicateReport>;
using LateReport = ErrorOf<ErrorKind::kLateReport>;
using EpochGap = ErrorOf<ErrorKind::kEpochGap>;
using IoError = ErrorOf<ErrorKind::kIo>;

}  // namespace privaflow
