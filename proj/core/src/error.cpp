#include "dsm/error.hpp"

namespace dsm {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::CropOutOfRange: return "CropOutOfRange";
    case ErrorCode::DegenerateStatistics: return "DegenerateStatistics";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroSupport: return "ZeroSupport";
    case ErrorCode::NotAPeak: return "NotAPeak";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DivergedTraining: return "DivergedTraining";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::CurveShorterThanScale: return "CurveShorterThanScale";
    case ErrorCode::InsufficientScales: return "InsufficientScales";
    case ErrorCode::NoUsableScales: return "NoUsableScales";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateSubject: return "DuplicateSubject";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InconsistentRoiSets: return "InconsistentRoiSets";
    case ErrorCode::MissingDs: return "MissingDs";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::PerplexityTooLarge: return "PerplexityTooLarge";
    case ErrorCode::WrongColumnCount: return "WrongColumnCount";
    case ErrorCode::MissingPairing: return "MissingPairing";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace dsm
