#include "privaflow/errors.hpp"

namespace privaflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kUnsupportedSecurityLevel: return "UnsupportedSecurityLevel";
    case ErrorKind::kInvalidK: return "InvalidK";
    case ErrorKind::kSeriesTooShort: return "SeriesTooShort";
    case ErrorKind::kEmptySplit: return "EmptySplit";
    case ErrorKind::kDecode: return "DecodeError";
    case ErrorKind::kNotInRange: return "NotInRange";
    case ErrorKind::kUnknownDriver: return "UnknownDriver";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kMissingDriver: return "MissingDriver";
    case ErrorKind::kDuplicateDriver: return "DuplicateDriver";
    case ErrorKind::kOutOfBounds: return "OutOfBounds";
    case ErrorKind::kInvalidCell: return "InvalidCell";
    case ErrorKind::kPoolExhausted: return "PoolExhausted";
    case ErrorKind::kDuplicateReport: return "DuplicateReport";
    case ErrorKind::kLateReport: return "LateReport";
    case ErrorKind::kEpochGap: return "EpochGap";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kUnsupportedSecurityLevel:
    case ErrorKind::kInvalidK:
    case ErrorKind::kSeriesTooShort:
    case ErrorKind::kEmptySplit:
      return 2;
    case ErrorKind::kIo:
      return 4;
    default:
      return 3;
  }
}

}  // namespace privaflow
