#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcii {

enum class ErrorCode {
  NonSquare,
  NonFiniteEntry,
  NonPositiveEntry,
  EntryOutOfRange,
  NonUnitDiagonal,
  ReciprocityViolation,
  NotReciprocal,
  OrderTooSmall,
  IndexOutOfRange,
  SelectorOutOfRange,
  NonInjectiveSelector,
  InvalidPermutation,
  NonPositiveScaling,
  DimensionMismatch,
  EigenvalueNonconvergence,
  ShapeFunctionViolation,
  ZeroTrueValue,
  UnknownIndicator,
  UnknownAxiom,
  ParseError,
  SuiteViolation,
  TooFewEntities,
  DuplicateLabel,
  NonConformingIndicator,
  UnknownSession,
  UnknownLabel,
  NonPositiveRatio,
  IncompleteSession,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as this exception. Matrix errors
/// carry the offending entry as 1-based (row, col); row-only errors such as
/// NonUnitDiagonal leave col empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> col = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
};

}  // namespace pcii
