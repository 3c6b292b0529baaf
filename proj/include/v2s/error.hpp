#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace v2s {

enum class ErrorCode {
  // events
  MalformedLine,
  NonMonotonicTimestamp,
  OutOfBoundsPixel,
  // synth
  InvalidProfile,
  // preprocess
  EmptyWindow,
  EmptyTrainingSet,
  // encode
  OutOfRange,
  // snn
  DuplicateId,
  DanglingSynapse,
  BadDelay,
  BadParameter,
  MissingIO,
  SchemaViolation,
  EmptyOutputs,
  // evolve
  IncompatibleSignatures,
  InvalidConfig,
  // harness
  LengthMismatch,
  ClassOutOfRange,
  EmptyMatrix,
  ClassWithoutTrials,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Input or validation failure raised by any pipeline stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace v2s
