#include "safeml/error.hpp"

namespace safeml {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientClassSamples: return "InsufficientClassSamples";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorCode::NoUsableRows: return "NoUsableRows";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::StreamTooShort: return "StreamTooShort";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  return code != ErrorCode::Io;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace safeml
