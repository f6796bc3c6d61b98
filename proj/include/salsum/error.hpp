#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace salsum {

enum class ErrorCode {
  MissingField,
  BadPath,
  NonPositiveFps,
  InvalidField,
  TooFewFrames,
  DecodeError,
  MissingMap,
  SizeMismatch,
  BadBinCount,
  BinMismatch,
  LengthMismatch,
  WrongArity,
  MissingWeights,
  EvenWindow,
  SeriesTooShort,
  ZeroCandidates,
  ZeroGroundTruth,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::NonPositiveFps: return "NonPositiveFps";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::MissingMap: return "MissingMap";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BadBinCount: return "BadBinCount";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::MissingWeights: return "MissingWeights";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ZeroCandidates: return "ZeroCandidates";
    case ErrorCode::ZeroGroundTruth: return "ZeroGroundTruth";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying the module
/// that raised it and a code that tests and the CLI can branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& detail)
      : std::runtime_error(std::string(module) + ": " + std::string(to_string(code)) + ": " + detail),
        code_(code),
        module_(std::move(module)),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string detail_;
};

}  // namespace salsum
