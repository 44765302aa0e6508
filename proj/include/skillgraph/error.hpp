#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skillgraph {

enum class ErrorCode {
  InvalidArgument,
  MissingField,
  DuplicateId,
  BadIsco,
  InvalidRecord,
  BadConfig,
  EmptyTaskList,
  OutOfRange,
  ProviderFailure,
  EmptyLabels,
  UnknownForm,
  BadCounts,
  MissingJudgment,
  UnresolvedMention,
  EmptyGraph,
  TooFewPoints,
  DegenerateSample,
  PartialAssignment,
  UnknownActivity,
  UnknownJob,
  EmptySourceNeighborhood,
  BadThresholds,
  IoFailure,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a machine-readable code and the
// offending item (line number, id, surface form) in `detail`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, const std::string& message);
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace skillgraph
