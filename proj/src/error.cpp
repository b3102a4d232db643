#include "fastcar/error.hpp"

namespace fastcar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateIntervals: return "DegenerateIntervals";
    case ErrorCode::InvalidU: return "InvalidU";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::PropertyOutOfInterval: return "PropertyOutOfInterval";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NoOverlapPossible: return "NoOverlapPossible";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroTrueValue: return "ZeroTrueValue";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonNumericProperty: return "NonNumericProperty";
    case ErrorCode::IntervalCountMismatch: return "IntervalCountMismatch";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InsufficientEpochs: return "InsufficientEpochs";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += "(line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)),
      code_(code),
      line_(line) {}

}  // namespace fastcar
