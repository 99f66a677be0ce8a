#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cellgraph {

enum class ErrorCode {
  ParseError,
  DuplicateCellId,
  InconsistentSitePosition,
  DuplicateRecord,
  EmptyTrainingSet,
  InvalidConfig,
  EmptyInventory,
  NoFourGCells,
  DimensionMismatch,
  NonFiniteLoss,
  SingularSystem,
  CoLocatedSites,
  InvalidArgument,
  LabelBelowFloor,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateCellId: return "DuplicateCellId";
    case ErrorCode::InconsistentSitePosition: return "InconsistentSitePosition";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyInventory: return "EmptyInventory";
    case ErrorCode::NoFourGCells: return "NoFourGCells";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::CoLocatedSites: return "CoLocatedSites";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LabelBelowFloor: return "LabelBelowFloor";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Library-wide exception. `field` names the offending input field when one
/// exists; `line` is the 1-based file line for parse errors (0 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {}, std::size_t line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        field_(std::move(field)),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string field_;
  std::size_t line_;
};

}  // namespace cellgraph
