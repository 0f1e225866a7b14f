#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsm {

enum class ErrorCode {
  EmptyInput,
  CropOutOfRange,
  DegenerateStatistics,
  InsufficientData,
  ConstantSeries,
  LengthMismatch,
  ZeroSupport,
  NotAPeak,
  NonFiniteInput,
  SeriesTooShort,
  DivergedTraining,
  DimensionMismatch,
  EmptyGrid,
  WindowOutOfRange,
  CurveShorterThanScale,
  InsufficientScales,
  NoUsableScales,
  ConstantInput,
  InvalidParameter,
  MalformedCsv,
  EmptyTable,
  UnknownLabel,
  DuplicateSubject,
  MissingFile,
  BadMagic,
  UnsupportedDatatype,
  TruncatedData,
  DimMismatch,
  EmptyMask,
  InconsistentRoiSets,
  MissingDs,
  MissingValue,
  SingleClassTraining,
  NonFiniteLoss,
  EmptyEvaluation,
  TooFewPerClass,
  DegenerateCovariance,
  PerplexityTooLarge,
  WrongColumnCount,
  MissingPairing,
  MalformedModel,
  IoError,
};

/// Stable identifier used in JSON reports and CLI messages.
std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsm
