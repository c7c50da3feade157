#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace canon {

/// Broad failure class. The CLI maps these onto exit codes 2, 3 and 4.
enum class ErrorCategory { Config, Data, Internal };

/// Named failure conditions raised across the toolkit.
enum class ErrorCode {
  // corpus ingest
  MissingFile,
  EmptyBook,
  EncodingError,
  NoChaptersFound,
  InvalidManifest,
  DuplicateDocument,
  EmptyChapter,
  // preprocess
  EmptyInput,
  // dtm
  AllDocumentsEmpty,
  UnknownBook,
  ZeroRow,
  MalformedMatrix,
  // distance
  LengthMismatch,
  BothZero,
  ZeroVector,
  DegenerateMeasure,
  TooFewRows,
  // classify
  DimensionMismatch,
  EmptyClass,
  NonFiniteObjective,
  InvalidHyperparameter,
  MalformedModel,
  // evaluate
  TooManyFolds,
  EmptyGrid,
  // generic
  InvalidArgument,
  IoError,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace canon
