#include "v2s/error.hpp"

namespace v2s {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::OutOfBoundsPixel: return "OutOfBoundsPixel";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingSynapse: return "DanglingSynapse";
    case ErrorCode::BadDelay: return "BadDelay";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::MissingIO: return "MissingIO";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EmptyOutputs: return "EmptyOutputs";
    case ErrorCode::IncompatibleSignatures: return "IncompatibleSignatures";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ClassWithoutTrials: return "ClassWithoutTrials";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace v2s
