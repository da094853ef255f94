#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustiv {

enum class ErrorCode {
  InvalidArgument,
  MissingColumn,
  TooFewObservations,
  ConstantColumn,
  NonFinite,
  ParseError,
  DimensionMismatch,
  RankDeficient,
  NotConverged,
  OneClassOnly,
  NoRelevantIV,
  DivisionGuard,
  SingularWeight,
  EmptyGraph,
  EmptySearchSet,
  UnderIdentified,
  TooManyFailures,
};

std::string_view to_string(ErrorCode code) noexcept;

// Statistical failures are properties of the data under analysis (exit code
// 2 in the CLI); the rest are input or usage problems.
bool is_statistical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robustiv
