#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fastcar {

enum class ErrorCode {
  InvalidArgument,
  DegenerateIntervals,
  InvalidU,
  ClassOutOfRange,
  PropertyOutOfInterval,
  NonFiniteInput,
  NoOverlapPossible,
  LengthMismatch,
  EmptyInput,
  ZeroTrueValue,
  MissingHeader,
  MalformedRow,
  EmptyFile,
  NonNumericProperty,
  IntervalCountMismatch,
  ClassTooSmall,
  DimMismatch,
  NonFiniteLoss,
  InsufficientEpochs,
  SchemaViolation,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as this exception. `line` carries a
// 1-based file line for ingestion errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace fastcar
