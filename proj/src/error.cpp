#include "canon/error.hpp"

namespace canon {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyBook: return "EmptyBook";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::NoChaptersFound: return "NoChaptersFound";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::DuplicateDocument: return "DuplicateDocument";
    case ErrorCode::EmptyChapter: return "EmptyChapter";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AllDocumentsEmpty: return "AllDocumentsEmpty";
    case ErrorCode::UnknownBook: return "UnknownBook";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateMeasure: return "DegenerateMeasure";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::TooManyFolds: return "TooManyFolds";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidManifest:
    case ErrorCode::InvalidHyperparameter:
    case ErrorCode::TooManyFolds:
    case ErrorCode::EmptyGrid:
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Config;
    case ErrorCode::InvariantViolation:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace canon
