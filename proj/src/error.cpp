#include "surrokit/error.hpp"

namespace surrokit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateObservation: return "DuplicateObservation";
    case ErrorCode::MissingDay: return "MissingDay";
    case ErrorCode::NoControlArm: return "NoControlArm";
    case ErrorCode::MultipleControlArms: return "MultipleControlArms";
    case ErrorCode::NoTreatmentArm: return "NoTreatmentArm";
    case ErrorCode::NonFiniteOutcome: return "NonFiniteOutcome";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingPrePeriod: return "MissingPrePeriod";
    case ErrorCode::UnknownArm: return "UnknownArm";
    case ErrorCode::ControlAsTreatment: return "ControlAsTreatment";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidCycle: return "InvalidCycle";
    case ErrorCode::InvalidRecall: return "InvalidRecall";
    case ErrorCode::Io: return "Io";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::TooFewRows:
    case ErrorCode::DegenerateGroup:
    case ErrorCode::ZeroVariance:
    case ErrorCode::UndefinedMetric:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace surrokit
