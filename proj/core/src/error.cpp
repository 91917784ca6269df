#include "lienc/error.hpp"

namespace lienc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidBound: return "InvalidBound";
    case ErrorCode::InvalidPermIndex: return "InvalidPermIndex";
    case ErrorCode::BadBlockShape: return "BadBlockShape";
    case ErrorCode::BadKeyLength: return "BadKeyLength";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::NibbleOutOfRange: return "NibbleOutOfRange";
    case ErrorCode::DimensionNotMultipleOfBlock: return "DimensionNotMultipleOfBlock";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorCode::MissingPairs: return "MissingPairs";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NumericalDivergence: return "NumericalDivergence";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MissingN: return "MissingN";
  }
  return "Unknown";
}

}  // namespace lienc
