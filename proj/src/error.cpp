#include "pcii/error.hpp"

namespace pcii {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::NonUnitDiagonal: return "NonUnitDiagonal";
    case ErrorCode::ReciprocityViolation: return "ReciprocityViolation";
    case ErrorCode::NotReciprocal: return "NotReciprocal";
    case ErrorCode::OrderTooSmall: return "OrderTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelectorOutOfRange: return "SelectorOutOfRange";
    case ErrorCode::NonInjectiveSelector: return "NonInjectiveSelector";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::NonPositiveScaling: return "NonPositiveScaling";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigenvalueNonconvergence: return "EigenvalueNonconvergence";
    case ErrorCode::ShapeFunctionViolation: return "ShapeFunctionViolation";
    case ErrorCode::ZeroTrueValue: return "ZeroTrueValue";
    case ErrorCode::UnknownIndicator: return "UnknownIndicator";
    case ErrorCode::UnknownAxiom: return "UnknownAxiom";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SuiteViolation: return "SuiteViolation";
    case ErrorCode::TooFewEntities: return "TooFewEntities";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NonConformingIndicator: return "NonConformingIndicator";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::IncompleteSession: return "IncompleteSession";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row, std::optional<std::size_t> col)
    : std::runtime_error(message), code_(code), row_(row), col_(col) {}

}  // namespace pcii
