#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lienc {

enum class ErrorCode {
  // image-core
  BadMagic,
  UnsupportedMaxval,
  Truncated,
  EmptyDataset,
  DimensionMismatch,
  // keyed-prng
  InvalidBound,
  // ciphers
  InvalidPermIndex,
  BadBlockShape,
  BadKeyLength,
  NotAPermutation,
  NibbleOutOfRange,
  DimensionNotMultipleOfBlock,
  // attacks
  InvalidParams,
  InsufficientPairs,
  SingularSystem,
  DisjointnessViolation,
  MissingPairs,
  // nn-core
  ShapeMismatch,
  NumericalDivergence,
  BadCheckpoint,
  // metrics
  TooSmall,
  EmptyList,
  // harness
  Config,
  Io,
  MissingN,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lienc
