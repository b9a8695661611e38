#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace safeml {

enum class ErrorCode {
  EmptySample,
  NonFiniteValue,
  InsufficientSamples,
  DegenerateInput,
  SingularCovariance,
  DimensionMismatch,
  InvalidArgument,
  InsufficientClassSamples,
  UnknownAlgorithm,
  LengthMismatch,
  InvalidCount,
  MissingLabelColumn,
  NoUsableRows,
  MalformedCsv,
  InvalidSplit,
  StreamTooShort,
  UnsupportedVersion,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Errors caused by caller input (as opposed to I/O or internal failures).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace safeml
