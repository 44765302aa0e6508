#include "skillgraph/error.hpp"

namespace skillgraph {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BadIsco: return "BadIsco";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::EmptyTaskList: return "EmptyTaskList";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::EmptyLabels: return "EmptyLabels";
    case ErrorCode::UnknownForm: return "UnknownForm";
    case ErrorCode::BadCounts: return "BadCounts";
    case ErrorCode::MissingJudgment: return "MissingJudgment";
    case ErrorCode::UnresolvedMention: return "UnresolvedMention";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::PartialAssignment: return "PartialAssignment";
    case ErrorCode::UnknownActivity: return "UnknownActivity";
    case ErrorCode::UnknownJob: return "UnknownJob";
    case ErrorCode::EmptySourceNeighborhood: return "EmptySourceNeighborhood";
    case ErrorCode::BadThresholds: return "BadThresholds";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

namespace {
std::string compose(ErrorCode code, const std::string& detail) {
  std::string out(error_code_name(code));
  if (!detail.empty()) out += "(" + detail + ")";
  return out;
}
}  // namespace

Error::Error(ErrorCode code, std::string detail, const std::string& message)
    : std::runtime_error(compose(code, detail) + ": " + message),
      code_(code),
      detail_(std::move(detail)) {}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail)) {}

}  // namespace skillgraph
