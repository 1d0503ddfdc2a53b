#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surrokit {

enum class ErrorCode {
  // data validation
  MalformedRow,
  DuplicateObservation,
  MissingDay,
  NoControlArm,
  MultipleControlArms,
  NoTreatmentArm,
  NonFiniteOutcome,
  OutOfRange,
  MissingPrePeriod,
  UnknownArm,
  ControlAsTreatment,
  KeyMismatch,
  EmptyInput,
  InvalidConfig,
  InvalidArgument,
  InvalidCycle,
  InvalidRecall,
  Io,
  // numerical failure
  RankDeficient,
  TooFewRows,
  DegenerateGroup,
  ZeroVariance,
  UndefinedMetric,
};

std::string_view to_string(ErrorCode code);

/// True for codes that signal a numerical failure rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace surrokit
